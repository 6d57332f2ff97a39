use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::code::{count_loc, estimate_complexity};
use super::ledger::{contribution_ledger, ownership_vector, ContributionUnit};
use super::Thresholds;
use crate::ingest::{BugLinkTable, RepoSnapshot};

/// Current source text and externally measured complexity, keyed by path.
/// An override entry wins over the estimator.
#[derive(Debug, Clone, Default)]
pub struct CodeInputs {
    pub sources: BTreeMap<String, String>,
    pub complexity_overrides: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileMetricsRow {
    pub path: String,
    /// Share of the highest contributor (MVO).
    pub ownership: f64,
    /// Developers at or above the minor cut-off.
    pub major: usize,
    /// Developers below the minor cut-off (5% by default).
    pub minors_5: usize,
    /// Developers below the weak cut-off (50% by default).
    pub minors_50: usize,
    /// Developers below the minimal cut-off (20% by default).
    pub minimals: usize,
    pub total: usize,
    /// Commits modifying the file.
    pub touches: usize,
    pub churn: u64,
    pub size_loc: u64,
    pub complexity: u64,
    pub bug_count: usize,
}

impl FileMetricsRow {
    /// Numeric metric columns, in report order. `bug_count` is the response
    /// and is not listed, though [`Self::value`] resolves it.
    pub const METRICS: [&'static str; 10] = [
        "ownership",
        "major",
        "minors_5",
        "minors_50",
        "minimals",
        "total",
        "touches",
        "churn",
        "size_loc",
        "complexity",
    ];

    pub fn value(&self, metric: &str) -> Option<f64> {
        Some(match metric {
            "ownership" => self.ownership,
            "major" => self.major as f64,
            "minors_5" => self.minors_5 as f64,
            "minors_50" => self.minors_50 as f64,
            "minimals" => self.minimals as f64,
            "total" => self.total as f64,
            "touches" => self.touches as f64,
            "churn" => self.churn as f64,
            "size_loc" => self.size_loc as f64,
            "complexity" => self.complexity as f64,
            "bug_count" => self.bug_count as f64,
            _ => return None,
        })
    }
}

/// One row per file with nonzero contribution under `unit`.
pub fn file_metrics(
    snapshot: &RepoSnapshot,
    bug_links: &BugLinkTable,
    thresholds: &Thresholds,
    unit: ContributionUnit,
    code: &CodeInputs,
) -> Vec<FileMetricsRow> {
    let ledger = contribution_ledger(snapshot, unit);
    let mut rows = Vec::new();
    for (path, history) in &snapshot.files {
        let Ok(vector) = ownership_vector(&ledger, path) else {
            continue;
        };
        let mut commits: Vec<&str> = history.iter().map(|t| t.hash.as_str()).collect();
        commits.sort_unstable();
        commits.dedup();
        let source = code.sources.get(path);
        let complexity = match code.complexity_overrides.get(path) {
            Some(c) => *c,
            None => source.map_or(0, |s| estimate_complexity(s)),
        };
        rows.push(FileMetricsRow {
            path: path.clone(),
            ownership: vector.max_weight(),
            major: vector.at_or_above(thresholds.minor_pct),
            minors_5: vector.below(thresholds.minor_pct),
            minors_50: vector.below(thresholds.weak_pct),
            minimals: vector.below(thresholds.minimal_pct),
            total: vector.contributors(),
            touches: commits.len(),
            churn: history.iter().map(|t| t.added + t.deleted).sum(),
            size_loc: source.map_or(0, |s| count_loc(s)),
            complexity,
            bug_count: bug_links.bug_count(path),
        });
    }
    rows
}
