//! CSV, Markdown and JSON renderings of a [`ReportBundle`].

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::Format;
use super::run::{ImportanceTable, ReportBundle};
use super::PipelineError;
use crate::ownership::{DirectoryMetricsRow, FileMetricsRow};
use crate::stats::CorrelationTable;

/// Correlations strictly above this magnitude are bold in Markdown.
pub const BOLD_ABOVE: f64 = 0.50;
/// Correlations strictly above this magnitude are also underlined.
pub const UNDERLINE_ABOVE: f64 = 0.75;

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: ToString>(header: &[S]) -> Self {
        Self { header: header.iter().map(ToString::to_string).collect(), rows: Vec::new() }
    }

    fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    fn to_md(&self) -> String {
        let mut s = format!("| {} |\n", self.header.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(self.header.len()));
        for r in &self.rows {
            let _ = writeln!(s, "| {} |", r.join(" | "));
        }
        s
    }
}

fn full(v: f64) -> String {
    format!("{v}")
}

fn opt_full(v: Option<f64>) -> String {
    v.map(full).unwrap_or_default()
}

fn two(v: f64) -> String {
    format!("{v:.2}")
}

fn opt_two(v: Option<f64>) -> String {
    v.map(two).unwrap_or_else(|| "n/a".into())
}

/// Markdown cell for a correlation, using the bold / underline legend.
pub fn rho_cell(rho: Option<f64>) -> String {
    match rho {
        None => "n/a".into(),
        Some(r) if r.abs() > UNDERLINE_ABOVE => format!("<u>**{r:.2}**</u>"),
        Some(r) if r.abs() > BOLD_ABOVE => format!("**{r:.2}**"),
        Some(r) => format!("{r:.2}"),
    }
}

impl ReportBundle {
    fn stamp(&self, mut t: Table) -> Table {
        t.header.push("seed".into());
        t.header.push("version".into());
        for r in &mut t.rows {
            r.push(self.seed.to_string());
            r.push(self.version.clone());
        }
        t
    }

    fn summary_table(&self, md: bool) -> Table {
        let mut t = Table::new(&["project", "commits", "files", "bugfixes", "loc", "churn", "complexity", "developers"]);
        for s in &self.summary {
            t.rows.push(vec![
                s.project.clone(),
                s.commits.to_string(),
                s.files.to_string(),
                s.bugfixes.to_string(),
                s.loc.to_string(),
                s.churn.to_string(),
                if md { two(s.complexity) } else { full(s.complexity) },
                s.developers.to_string(),
            ]);
        }
        t
    }

    fn files_table(&self) -> Table {
        let mut header = vec!["project", "path"];
        header.extend(FileMetricsRow::METRICS);
        header.push("bug_count");
        let mut t = Table::new(&header);
        for p in &self.files {
            for r in &p.rows {
                let mut row = vec![p.project.clone(), r.path.clone()];
                row.extend(header[2..].iter().map(|m| full(r.value(m).expect("known metric"))));
                t.rows.push(row);
            }
        }
        t
    }

    fn dirs_table(&self) -> Table {
        let mut header = vec!["project", "dir"];
        header.extend(DirectoryMetricsRow::METRICS);
        header.extend(["bug_count", "n_files"]);
        let mut t = Table::new(&header);
        for p in &self.directories {
            for r in &p.rows {
                let mut row = vec![p.project.clone(), r.dir.clone()];
                row.extend(header[2..].iter().map(|m| full(r.value(m).expect("known metric"))));
                t.rows.push(row);
            }
        }
        t
    }

    fn sweep_table(&self, md: bool) -> Option<Table> {
        let sweep = self.sweep.as_ref()?;
        if md {
            // One row per project, one column per model; stars mark a
            // significant gain over the predecessor.
            let mut header = vec!["Project".to_string()];
            header.extend(sweep.models.iter().cloned());
            let mut t = Table::new(&header);
            for r in &sweep.rows {
                let mut row = vec![r.project.clone()];
                for c in &r.cells {
                    row.push(format!("{}{}", two(c.r2), if c.significant { "*" } else { "" }));
                }
                t.rows.push(row);
            }
            let mut avg = vec!["Avg.".to_string()];
            avg.extend(sweep.averages.iter().map(|a| opt_two(*a)));
            t.rows.push(avg);
            return Some(t);
        }
        let mut t = Table::new(&[
            "project", "n", "model", "predecessor", "r2", "delta", "f_stat", "df1", "df2", "p_value", "significant",
            "excluded",
        ]);
        for r in &sweep.rows {
            for c in &r.cells {
                let f = c.f_test.as_ref();
                t.rows.push(vec![
                    r.project.clone(),
                    r.n.to_string(),
                    c.model.clone(),
                    c.predecessor.clone().unwrap_or_default(),
                    full(c.r2),
                    opt_full(c.delta),
                    opt_full(f.map(|f| f.f_stat)),
                    opt_full(f.map(|f| f.df1)),
                    opt_full(f.map(|f| f.df2)),
                    opt_full(f.map(|f| f.p_value)),
                    c.significant.to_string(),
                    r.excluded.join(";"),
                ]);
            }
        }
        for (model, avg) in sweep.models.iter().zip(&sweep.averages) {
            let mut row = vec![String::new(); 12];
            row[0] = "Avg.".into();
            row[2] = model.clone();
            row[4] = opt_full(*avg);
            t.rows.push(row);
        }
        Some(t)
    }

    fn lmg_table(&self, md: bool) -> Option<Table> {
        let rows = self.lmg.as_ref()?;
        let mut t = Table::new(&["project", "metric", "share"]);
        for r in rows {
            t.rows.push(vec![r.project.clone(), r.metric.clone(), if md { two(r.share) } else { full(r.share) }]);
        }
        Some(t)
    }

    fn classification_table(&self, md: bool) -> Option<Table> {
        let rows = self.classification.as_ref()?;
        let mut t = Table::new(&[
            "project", "level", "precision", "recall", "f1", "cv_f1_mean", "cv_f1_sd", "n_train", "n_test",
        ]);
        let fmt = |v: f64| if md { two(v) } else { full(v) };
        let ofmt = |v: Option<f64>| if md { opt_two(v) } else { opt_full(v) };
        for r in rows {
            let e = &r.report;
            t.rows.push(vec![
                r.project.clone(),
                e.level.to_string(),
                fmt(e.precision),
                fmt(e.recall),
                fmt(e.f1),
                ofmt(e.cv_f1_mean),
                ofmt(e.cv_f1_sd),
                e.n_train.to_string(),
                e.n_test.to_string(),
            ]);
        }
        Some(t)
    }

    fn stamped_csvs(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![("summary.csv", self.stamp(self.summary_table(false)).to_csv())];
        if !self.files.is_empty() {
            out.push(("files_metrics.csv", self.stamp(self.files_table()).to_csv()));
            out.push(("dir_metrics.csv", self.stamp(self.dirs_table()).to_csv()));
        }
        if let Some(c) = &self.corr_file {
            out.push(("corr_file.csv", self.stamp(correlation_csv(c)).to_csv()));
        }
        if let Some(c) = &self.corr_dir {
            out.push(("corr_dir.csv", self.stamp(correlation_csv(c)).to_csv()));
        }
        if let Some(t) = self.sweep_table(false) {
            out.push(("regression_sweep.csv", self.stamp(t).to_csv()));
        }
        if let Some(t) = self.lmg_table(false) {
            out.push(("lmg.csv", self.stamp(t).to_csv()));
        }
        if let Some(t) = self.classification_table(false) {
            out.push(("classification.csv", self.stamp(t).to_csv()));
        }
        if let Some(t) = &self.importance_file {
            out.push(("importance_file.csv", self.stamp(importance_table(t, false)).to_csv()));
        }
        if let Some(t) = &self.importance_dir {
            out.push(("importance_dir.csv", self.stamp(importance_table(t, false)).to_csv()));
        }
        out
    }

    /// The whole report as one Markdown document.
    pub fn to_markdown(&self) -> String {
        let mut s = format!("# Ownership analysis\n\nseed {} · version {}\n\n", self.seed, self.version);
        let mut section = |title: &str, body: String| {
            let _ = write!(s, "## {title}\n\n{body}\n");
        };
        section("Projects", self.summary_table(true).to_md());
        if let Some(c) = &self.corr_file {
            section("Spearman correlation with bug count, file level", correlation_md(c));
        }
        if let Some(c) = &self.corr_dir {
            section("Spearman correlation with bug count, directory level", correlation_md(c));
        }
        if let Some(t) = self.sweep_table(true) {
            section("Regression R² by model (* significant gain over predecessor)", t.to_md());
        }
        if let Some(t) = self.lmg_table(true) {
            section("Relative importance (LMG)", t.to_md());
        }
        if let Some(t) = self.classification_table(true) {
            section("Defect classification", t.to_md());
        }
        if let Some(t) = &self.importance_file {
            section("Metric importance, file level", importance_table(t, true).to_md());
        }
        if let Some(t) = &self.importance_dir {
            section("Metric importance, directory level", importance_table(t, true).to_md());
        }
        s
    }

    pub fn diagnostics_log(&self) -> String {
        self.diagnostics.iter().map(|d| format!("{d}\n")).collect()
    }
}

fn correlation_csv(c: &CorrelationTable) -> Table {
    let mut header = vec!["metric".to_string()];
    header.extend(c.projects.iter().cloned());
    header.push("average".into());
    let mut t = Table::new(&header);
    for r in &c.rows {
        let mut row = vec![r.metric.clone()];
        row.extend(r.cells.iter().map(|v| opt_full(*v)));
        row.push(opt_full(r.average));
        t.rows.push(row);
    }
    t
}

/// Metrics down, projects across, average last; magnitudes above 0.50 in
/// bold and above 0.75 bold and underlined.
pub fn correlation_md(c: &CorrelationTable) -> String {
    let mut header = vec!["Metrics".to_string()];
    header.extend(c.projects.iter().cloned());
    header.push("Avg.".into());
    let mut t = Table::new(&header);
    for r in &c.rows {
        let mut row = vec![r.metric.clone()];
        row.extend(r.cells.iter().map(|v| rho_cell(*v)));
        row.push(rho_cell(r.average));
        t.rows.push(row);
    }
    t.to_md()
}

fn importance_table(tables: &[ImportanceTable], md: bool) -> Table {
    let mut metrics: Vec<&str> = Vec::new();
    for t in tables {
        for r in &t.rows {
            if !metrics.contains(&r.metric.as_str()) {
                metrics.push(&r.metric);
            }
        }
    }
    let mut header = vec!["metric".to_string()];
    header.extend(tables.iter().map(|t| t.project.clone()));
    header.push("average".into());
    let mut out = Table::new(&header);
    for m in metrics {
        let cells: Vec<Option<f64>> = tables
            .iter()
            .map(|t| t.rows.iter().find(|r| r.metric == m).map(|r| r.importance))
            .collect();
        let defined: Vec<f64> = cells.iter().flatten().copied().collect();
        let avg = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
        let mut row = vec![m.to_string()];
        if md {
            row.extend(cells.iter().map(|c| c.map(|v| format!("{v:.3}")).unwrap_or_else(|| "n/a".into())));
            row.push(avg.map(|v| format!("{v:.3}")).unwrap_or_else(|| "n/a".into()));
        } else {
            row.extend(cells.iter().map(|c| opt_full(*c)));
            row.push(opt_full(avg));
        }
        out.rows.push(row);
    }
    out
}

/// Renders the requested formats into `(file name, contents)` pairs, in
/// write order. `diagnostics.log` is always included.
pub fn render_reports(bundle: &ReportBundle, formats: &BTreeSet<Format>) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    if formats.contains(&Format::Csv) {
        out.extend(bundle.stamped_csvs().into_iter().map(|(n, s)| (n.to_string(), s)));
    }
    if formats.contains(&Format::Md) {
        out.push(("summary.md".into(), bundle.to_markdown()));
    }
    if formats.contains(&Format::Json) {
        let json = serde_json::to_string_pretty(bundle).expect("bundle serializes") + "\n";
        out.push(("bundle.json".into(), json));
    }
    out.push(("diagnostics.log".into(), bundle.diagnostics_log()));
    out
}

pub fn emit_reports(bundle: &ReportBundle, dir: &Path, formats: &BTreeSet<Format>) -> Result<Vec<PathBuf>, PipelineError> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::Io { path: dir.to_path_buf(), source: e })?;
    let mut written = Vec::new();
    for (name, text) in render_reports(bundle, formats) {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| PipelineError::Io { path: path.clone(), source: e })?;
        written.push(path);
    }
    Ok(written)
}
