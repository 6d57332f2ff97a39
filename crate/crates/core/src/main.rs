use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ownlab::ingest::emit_commit_journal;
use ownlab::ownership::ContributionUnit;
use ownlab::pipeline::{
    emit_reports, load_config, load_project_commits, run_analysis, AnalysisConfig, Format, PipelineError,
    ReportBundle,
};
use ownlab::synth::{generate_history, SynthSpec};

#[derive(Parser)]
#[command(name = "ownlab", version, about = "Code ownership metrics and defect analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Analysis config (TOML, or JSON with a .json extension).
    #[arg(short = 'c', long = "config")]
    config: PathBuf,
    /// Output directory; overrides `output_dir`.
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of csv, json, md.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    #[arg(long)]
    unit: Option<ContributionUnit>,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize every project's history into a JSON-lines journal.
    Ingest(Common),
    /// File and directory ownership metrics.
    Metrics(Common),
    /// Metrics plus Spearman correlation tables.
    Correlate(Common),
    /// Correlations plus the regression sweep and relative importance.
    Regress(Common),
    /// Metrics plus defect classification and metric importance.
    Classify(Common),
    /// Every stage.
    Run(Common),
    /// Re-render reports from a saved bundle.json.
    Report {
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "csv,md")]
        format: Vec<Format>,
    },
    /// Generate a synthetic history with known ownership.
    Synth {
        #[arg(short = 's', long = "spec")]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Partial(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config { .. } | PipelineError::ConfigParse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Partial(e.to_string()),
        }
    }
}

fn configure(c: &Common) -> Result<AnalysisConfig, Failure> {
    let mut cfg = load_config(&c.config).map_err(|e| match e {
        PipelineError::Io { .. } => Failure::Usage(e.to_string()),
        other => other.into(),
    })?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(u) = c.unit {
        cfg.unit = u;
    }
    if let Some(f) = &c.format {
        cfg.formats = f.iter().copied().collect();
    }
    if let Some(o) = &c.out {
        cfg.output_dir = o.clone();
    } else {
        cfg.output_dir = cfg.resolve(&cfg.output_dir);
    }
    Ok(cfg)
}

fn write_bundle(bundle: &ReportBundle, dir: &Path, formats: &BTreeSet<Format>) -> Result<(), Failure> {
    for path in emit_reports(bundle, dir, formats)? {
        println!("{}", path.display());
    }
    for d in &bundle.diagnostics {
        eprintln!("{d}");
    }
    if bundle.has_skips() {
        Err(Failure::Partial("some stages were skipped; see diagnostics.log".into()))
    } else {
        Ok(())
    }
}

fn analyze(c: &Common, regression: bool, classifier: bool, correlate: bool) -> Result<(), Failure> {
    let mut cfg = configure(c)?;
    cfg.flags.run_regression &= regression;
    cfg.flags.run_classifier &= classifier;
    let mut bundle = run_analysis(&cfg)?;
    if !correlate {
        bundle.corr_file = None;
        bundle.corr_dir = None;
    }
    write_bundle(&bundle, &cfg.output_dir, &cfg.formats)
}

fn ingest(c: &Common) -> Result<(), Failure> {
    let cfg = configure(c)?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Failure::Partial(e.to_string()))?;
    let mut failed = false;
    for p in &cfg.projects {
        match load_project_commits(&cfg, &p.name) {
            Ok(commits) => {
                let path = cfg.output_dir.join(format!("{}.jsonl", p.name));
                std::fs::write(&path, emit_commit_journal(&commits))
                    .map_err(|e| Failure::Partial(format!("{}: {e}", path.display())))?;
                println!("{}\t{} commits", path.display(), commits.len());
            }
            Err(e) => {
                eprintln!("[skipped] {}: {e}", p.name);
                failed = true;
            }
        }
    }
    if failed {
        Err(Failure::Partial("some projects could not be ingested".into()))
    } else {
        Ok(())
    }
}

fn report(input: &Path, out: &Path, format: &[Format]) -> Result<(), Failure> {
    let text = std::fs::read_to_string(input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let bundle: ReportBundle =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    write_bundle(&bundle, out, &format.iter().copied().collect())
}

fn synth(spec: &Path, seed: u64, out: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("{}: {e}", spec.display())))?;
    let spec: SynthSpec = toml::from_str(&text).map_err(|e| Failure::Usage(e.message().to_string()))?;
    let (journal, truth) = generate_history(&spec, seed).map_err(|e| Failure::Usage(e.to_string()))?;
    std::fs::create_dir_all(out).map_err(|e| Failure::Partial(e.to_string()))?;
    let truth_json = serde_json::to_string_pretty(&truth).expect("truth serializes") + "\n";
    for (name, body) in [("journal.jsonl", journal), ("issues.json", truth.issue_export()), ("truth.json", truth_json)] {
        let path = out.join(name);
        std::fs::write(&path, body).map_err(|e| Failure::Partial(format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest(c) => ingest(c),
        Command::Metrics(c) => analyze(c, false, false, false),
        Command::Correlate(c) => analyze(c, false, false, true),
        Command::Regress(c) => analyze(c, true, false, true),
        Command::Classify(c) => analyze(c, false, true, false),
        Command::Run(c) => analyze(c, true, true, true),
        Command::Report { input, out, format } => report(input, out, format),
        Command::Synth { spec, seed, out } => synth(spec, *seed, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Partial(msg)) => {
            eprintln!("ownlab: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("ownlab: {msg}");
            ExitCode::from(2)
        }
    }
}
