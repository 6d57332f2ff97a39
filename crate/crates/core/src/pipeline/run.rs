use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::AnalysisConfig;
use super::PipelineError;
use crate::exec::Execution;
use crate::ingest::{
    build_bug_links, build_snapshot, load_commit_journal, load_issue_export, parse_numstat_log, BugAliases,
    CommitRecord, IdentityMap, IssuePatterns, PathFilter,
};
use crate::learn::{evaluate, mdi_importance, train_forest, Dataset, EvalReport, ImportanceRow, LearnError, Level};
use crate::ownership::{
    contribution_ledger, directory_metrics, file_metrics, CodeInputs, ContributionUnit, DirectoryMetricsRow,
    FileMetricsRow, Thresholds,
};
use crate::rng::{mix_named, mix_seed};
use crate::stats::{
    correlation_table, lmg_importance, regression_sweep, CorrelationTable, Observations, ProjectData, SweepTable,
};

/// Features fed to the file-level classifier.
pub const FILE_FEATURES: [&str; 4] = ["ownership", "minors_5", "minimals", "total"];
/// Predictors whose LMG shares are reported (the full regression model
/// plus the separately tested contributor count).
pub const LMG_PREDICTORS: [&str; 7] = ["size_loc", "churn", "complexity", "total", "minors_5", "major", "ownership"];
pub const TARGET: &str = "bug_count";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagLevel {
    Info,
    Warning,
    /// A stage or project was not computed.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub level: DiagLevel,
    pub project: Option<String>,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let level = match self.level {
            DiagLevel::Info => "info",
            DiagLevel::Warning => "warning",
            DiagLevel::Skipped => "skipped",
        };
        match &self.project {
            Some(p) => write!(f, "[{level}] {p}: {}", self.message),
            None => write!(f, "[{level}] {}", self.message),
        }
    }
}

fn diag(level: DiagLevel, project: Option<&str>, message: impl Into<String>) -> Diagnostic {
    Diagnostic { level, project: project.map(str::to_string), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub project: String,
    pub commits: usize,
    pub files: usize,
    /// Distinct bug issues linked to at least one analyzed file.
    pub bugfixes: usize,
    pub loc: u64,
    pub churn: u64,
    /// Mean complexity per file.
    pub complexity: f64,
    pub developers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectFiles {
    pub project: String,
    pub rows: Vec<FileMetricsRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectDirs {
    pub project: String,
    pub rows: Vec<DirectoryMetricsRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmgRow {
    pub project: String,
    pub metric: String,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRow {
    pub project: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceTable {
    pub project: String,
    pub rows: Vec<ImportanceRow>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub version: String,
    pub seed: u64,
    pub unit: ContributionUnit,
    pub thresholds: Thresholds,
    pub summary: Vec<SummaryRow>,
    pub files: Vec<ProjectFiles>,
    pub directories: Vec<ProjectDirs>,
    pub corr_file: Option<CorrelationTable>,
    pub corr_dir: Option<CorrelationTable>,
    pub sweep: Option<SweepTable>,
    pub lmg: Option<Vec<LmgRow>>,
    pub classification: Option<Vec<ClassificationRow>>,
    pub importance_file: Option<Vec<ImportanceTable>>,
    pub importance_dir: Option<Vec<ImportanceTable>>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ReportBundle {
    pub fn has_skips(&self) -> bool {
        self.diagnostics.iter().any(|d| d.level == DiagLevel::Skipped)
    }
}

/// Metrics of one successfully ingested project.
#[derive(Debug, Clone)]
pub struct ProjectMetrics {
    pub summary: SummaryRow,
    pub files: Vec<FileMetricsRow>,
    pub dirs: Vec<DirectoryMetricsRow>,
    pub notes: Vec<Diagnostic>,
}

fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })
}

fn ingest_err(path: &Path) -> impl FnOnce(crate::ingest::IngestError) -> PipelineError + '_ {
    move |e| PipelineError::Ingest { path: path.to_path_buf(), source: e }
}

/// Commit records of one project, from its journal or numstat log.
pub fn load_project_commits(cfg: &AnalysisConfig, name: &str) -> Result<Vec<CommitRecord>, PipelineError> {
    let project = cfg
        .projects
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| PipelineError::Config { key: "projects.name".into(), message: format!("no project `{name}`") })?;
    if let Some(j) = &project.journal {
        let path = cfg.resolve(j);
        load_commit_journal(&read(&path)?).map_err(ingest_err(&path))
    } else {
        let path = cfg.resolve(project.numstat.as_ref().expect("validated"));
        parse_numstat_log(&read(&path)?).map_err(ingest_err(&path))
    }
}

#[derive(Deserialize)]
struct ComplexityRecord {
    path: String,
    complexity: u64,
}

fn load_code_inputs(cfg: &AnalysisConfig, idx: usize, paths: impl Iterator<Item = String>) -> Result<CodeInputs, PipelineError> {
    let project = &cfg.projects[idx];
    let mut code = CodeInputs::default();
    if let Some(root) = &project.sources {
        let root = cfg.resolve(root);
        for path in paths {
            let full = root.join(&path);
            if let Ok(bytes) = std::fs::read(&full) {
                code.sources.insert(path, String::from_utf8_lossy(&bytes).into_owned());
            }
        }
    }
    if let Some(csv_path) = &project.complexity {
        let path = cfg.resolve(csv_path);
        let text = read(&path)?;
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        for rec in reader.deserialize::<ComplexityRecord>() {
            let rec = rec.map_err(|e| PipelineError::Ingest {
                path: path.clone(),
                source: crate::ingest::IngestError::Format(e.to_string()),
            })?;
            code.complexity_overrides.insert(rec.path, rec.complexity);
        }
    }
    Ok(code)
}

/// Ingest, snapshot, bug linking and metric computation for one project.
pub fn project_metrics(cfg: &AnalysisConfig, idx: usize) -> Result<ProjectMetrics, PipelineError> {
    let project = &cfg.projects[idx];
    let name = project.name.as_str();
    let mut notes = Vec::new();
    let commits = load_project_commits(cfg, name)?;

    let aliases = BugAliases::new(cfg.bug_aliases.iter().cloned());
    let issues = match &project.issues {
        Some(p) => {
            let path = cfg.resolve(p);
            load_issue_export(&read(&path)?, &aliases).map_err(ingest_err(&path))?
        }
        None => {
            notes.push(diag(DiagLevel::Warning, Some(name), "no issue export configured; bug counts are zero"));
            Vec::new()
        }
    };
    let patterns = IssuePatterns::new(&cfg.issue_patterns).map_err(|e| PipelineError::Config {
        key: "issue_patterns".into(),
        message: e.to_string(),
    })?;
    let odd_keys: Vec<&str> = issues.iter().map(|i| i.key.as_str()).filter(|k| !patterns.matches_key(k)).collect();
    if !odd_keys.is_empty() {
        notes.push(diag(
            DiagLevel::Warning,
            Some(name),
            format!("{} issue key(s) never match the reference patterns, e.g. {}", odd_keys.len(), odd_keys[0]),
        ));
    }

    let filter = PathFilter::new(&project.include, &project.exclude).map_err(|e| PipelineError::Config {
        key: "projects.include".into(),
        message: e.to_string(),
    })?;
    let identities = IdentityMap::new(project.identities.iter());
    let snapshot = build_snapshot(name, &commits, &filter, &identities);
    let links = build_bug_links(&commits, &issues, &patterns);
    if !links.unknown_refs.is_empty() {
        notes.push(diag(
            DiagLevel::Info,
            Some(name),
            format!("{} referenced key(s) missing from the issue export", links.unknown_refs.len()),
        ));
    }

    let code = load_code_inputs(cfg, idx, snapshot.files.keys().cloned())?;
    let files = file_metrics(&snapshot, &links, &cfg.thresholds, cfg.unit, &code);
    let ledger = contribution_ledger(&snapshot, cfg.unit);
    let dirs = directory_metrics(&files, &ledger, &links, &cfg.thresholds);

    let analyzed: std::collections::BTreeSet<&str> = files
        .iter()
        .filter_map(|f| links.bugs_of(&f.path))
        .flatten()
        .map(String::as_str)
        .collect();
    let n = files.len();
    let summary = SummaryRow {
        project: name.to_string(),
        commits: commits.len(),
        files: n,
        bugfixes: analyzed.len(),
        loc: files.iter().map(|f| f.size_loc).sum(),
        churn: files.iter().map(|f| f.churn).sum(),
        complexity: if n == 0 { 0.0 } else { files.iter().map(|f| f.complexity as f64).sum::<f64>() / n as f64 },
        developers: snapshot.developers.len(),
    };
    Ok(ProjectMetrics { summary, files, dirs, notes })
}

fn observations<R>(rows: &[R], metrics: &[&str], value: impl Fn(&R, &str) -> Option<f64>) -> Observations {
    let mut columns: Vec<String> = metrics.iter().map(|m| m.to_string()).collect();
    columns.push(TARGET.to_string());
    let data = rows
        .iter()
        .map(|r| columns.iter().map(|c| value(r, c).unwrap_or(0.0)).collect())
        .collect();
    Observations::new(columns, data).expect("rectangular by construction")
}

pub fn file_observations(rows: &[FileMetricsRow]) -> Observations {
    observations(rows, &FileMetricsRow::METRICS, |r, c| r.value(c))
}

pub fn dir_observations(rows: &[DirectoryMetricsRow]) -> Observations {
    observations(rows, &DirectoryMetricsRow::METRICS, |r, c| r.value(c))
}

fn dataset(obs: &Observations, features: &[&str], level: Level) -> Result<Dataset, LearnError> {
    let names: Vec<String> = features.iter().map(|s| s.to_string()).collect();
    let rows = obs.select(&names).expect("known columns");
    let labels = obs.column(TARGET).expect("target column").iter().map(|b| *b >= 1.0).collect();
    Dataset::new(names, rows, labels, level)
}

struct Classified {
    reports: Vec<ClassificationRow>,
    file_imp: Vec<ImportanceTable>,
    dir_imp: Vec<ImportanceTable>,
    notes: Vec<Diagnostic>,
}

fn classify_projects(cfg: &AnalysisConfig, files: &[ProjectData], dirs: &[ProjectData]) -> Classified {
    let params = cfg.eval_params();
    let mut out = Classified { reports: Vec::new(), file_imp: Vec::new(), dir_imp: Vec::new(), notes: Vec::new() };
    let levels: [(Level, &[ProjectData], Vec<&str>); 2] = [
        (Level::Directory, dirs, DirectoryMetricsRow::METRICS.to_vec()),
        (Level::File, files, FILE_FEATURES.to_vec()),
    ];
    for (project_idx, p) in files.iter().enumerate() {
        let seed = mix_named(cfg.seed, &p.name);
        for (stream, (level, data, features)) in levels.iter().enumerate() {
            let obs = &data[project_idx].data;
            let ds = match dataset(obs, features, *level) {
                Ok(d) => d,
                Err(e) => {
                    out.notes.push(diag(DiagLevel::Skipped, Some(&p.name), format!("{level} classifier: {e}")));
                    continue;
                }
            };
            match evaluate(&ds, &params, mix_seed(seed, 1 + stream as u64)) {
                Ok(report) => {
                    for d in &report.diagnostics {
                        out.notes.push(diag(DiagLevel::Warning, Some(&p.name), d.clone()));
                    }
                    out.reports.push(ClassificationRow { project: p.name.clone(), report });
                }
                Err(e) => out
                    .notes
                    .push(diag(DiagLevel::Skipped, Some(&p.name), format!("{level} classifier: {e}"))),
            }
            match train_forest(&ds, &params.forest, mix_seed(seed, 3 + stream as u64)) {
                Ok(model) => {
                    let table = ImportanceTable { project: p.name.clone(), rows: mdi_importance(&model, &ds.features) };
                    match level {
                        Level::File => out.file_imp.push(table),
                        Level::Directory => out.dir_imp.push(table),
                    }
                }
                Err(e) => out
                    .notes
                    .push(diag(DiagLevel::Skipped, Some(&p.name), format!("{level} importance: {e}"))),
            }
        }
    }
    out
}

fn lmg_rows(cfg: &AnalysisConfig, files: &[ProjectData]) -> (Vec<LmgRow>, Vec<Diagnostic>) {
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let results = cfg
        .execution
        .map(files, |p| lmg_importance(&p.data, &LMG_PREDICTORS, TARGET, Execution::Sequential));
    for (p, result) in files.iter().zip(results) {
        match result {
            Ok(shares) => rows.extend(LMG_PREDICTORS.iter().map(|m| LmgRow {
                project: p.name.clone(),
                metric: m.to_string(),
                share: shares[*m],
            })),
            Err(e) => notes.push(diag(DiagLevel::Skipped, Some(&p.name), format!("relative importance: {e}"))),
        }
    }
    (rows, notes)
}

/// Runs every configured stage over all projects. Projects that fail to
/// load are reported as diagnostics; the run fails only if none succeed.
pub fn run_analysis(cfg: &AnalysisConfig) -> Result<ReportBundle, PipelineError> {
    let mut bundle = ReportBundle {
        version: crate::VERSION.to_string(),
        seed: cfg.seed,
        unit: cfg.unit,
        thresholds: cfg.thresholds,
        ..Default::default()
    };
    let indices: Vec<usize> = (0..cfg.projects.len()).collect();
    let results = cfg.execution.map(&indices, |&i| project_metrics(cfg, i));

    let mut loaded = Vec::new();
    let mut failures = Vec::new();
    for (i, result) in results.into_iter().enumerate() {
        let name = cfg.projects[i].name.as_str();
        match result {
            Ok(m) => {
                bundle.diagnostics.extend(m.notes.iter().cloned());
                if m.files.is_empty() {
                    bundle
                        .diagnostics
                        .push(diag(DiagLevel::Skipped, Some(name), "no files with recorded contributions"));
                    bundle.summary.push(m.summary);
                    continue;
                }
                loaded.push(m);
            }
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                bundle.diagnostics.push(diag(DiagLevel::Skipped, Some(name), e.to_string()));
            }
        }
    }
    if loaded.is_empty() {
        return Err(PipelineError::NoProjects(failures));
    }

    let mut file_data = Vec::new();
    let mut dir_data = Vec::new();
    for m in loaded {
        let name = m.summary.project.clone();
        file_data.push(ProjectData { name: name.clone(), data: file_observations(&m.files) });
        dir_data.push(ProjectData { name: name.clone(), data: dir_observations(&m.dirs) });
        bundle.summary.push(m.summary);
        bundle.files.push(ProjectFiles { project: name.clone(), rows: m.files });
        bundle.directories.push(ProjectDirs { project: name, rows: m.dirs });
    }
    let order: BTreeMap<&str, usize> = cfg.projects.iter().enumerate().map(|(i, p)| (p.name.as_str(), i)).collect();
    bundle.summary.sort_by_key(|s| order[s.project.as_str()]);

    let corr_file = correlation_table(&file_data, &FileMetricsRow::METRICS, TARGET);
    let corr_dir = correlation_table(&dir_data, &DirectoryMetricsRow::METRICS, TARGET);
    for d in corr_file.diagnostics.iter().chain(&corr_dir.diagnostics) {
        bundle.diagnostics.push(diag(DiagLevel::Info, None, format!("correlation undefined: {d}")));
    }
    bundle.corr_file = Some(corr_file);
    bundle.corr_dir = Some(corr_dir);

    if cfg.flags.run_regression {
        let sweep = regression_sweep(&file_data, TARGET, cfg.alpha, cfg.execution);
        for d in &sweep.diagnostics {
            let level = if d.contains("skipped") { DiagLevel::Skipped } else { DiagLevel::Info };
            bundle.diagnostics.push(diag(level, None, d.clone()));
        }
        bundle.sweep = Some(sweep);
        let (rows, notes) = lmg_rows(cfg, &file_data);
        bundle.lmg = Some(rows);
        bundle.diagnostics.extend(notes);
    }

    if cfg.flags.run_classifier {
        let c = classify_projects(cfg, &file_data, &dir_data);
        bundle.classification = Some(c.reports);
        bundle.importance_file = Some(c.file_imp);
        bundle.importance_dir = Some(c.dir_imp);
        bundle.diagnostics.extend(c.notes);
    }
    Ok(bundle)
}
