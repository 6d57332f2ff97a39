use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::file::FileMetricsRow;
use super::ledger::ContributionLedger;
use super::Thresholds;
use crate::ingest::BugLinkTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectoryMetricsRow {
    pub dir: String,
    pub avgownership: f64,
    pub ownershipdir: f64,
    pub minownerdir: f64,
    pub avgcontributors: f64,
    pub pcminors: f64,
    pub pcminimals: f64,
    pub pcmajors: f64,
    pub avgminimals: f64,
    pub avgminors: f64,
    pub minownedfile: f64,
    pub weakowned: f64,
    pub bug_count: usize,
    pub n_files: usize,
}

impl DirectoryMetricsRow {
    pub const METRICS: [&'static str; 11] = [
        "avgownership",
        "ownershipdir",
        "minownerdir",
        "pcminors",
        "pcminimals",
        "pcmajors",
        "avgminors",
        "minownedfile",
        "avgminimals",
        "weakowned",
        "avgcontributors",
    ];

    pub fn value(&self, metric: &str) -> Option<f64> {
        Some(match metric {
            "avgownership" => self.avgownership,
            "ownershipdir" => self.ownershipdir,
            "minownerdir" => self.minownerdir,
            "avgcontributors" => self.avgcontributors,
            "pcminors" => self.pcminors,
            "pcminimals" => self.pcminimals,
            "pcmajors" => self.pcmajors,
            "avgminimals" => self.avgminimals,
            "avgminors" => self.avgminors,
            "minownedfile" => self.minownedfile,
            "weakowned" => self.weakowned,
            "bug_count" => self.bug_count as f64,
            "n_files" => self.n_files as f64,
            _ => return None,
        })
    }
}

/// Immediate parent directory of a repository path; `.` for top-level files.
pub fn directory_of(path: &str) -> &str {
    match path.rfind('/') {
        Some(i) => &path[..i],
        None => ".",
    }
}

/// Aggregates file rows by immediate parent directory.
///
/// Directory-level contributor shares pool the ledger's contributions over
/// the directory's files, so their unit follows the ledger.
pub fn directory_metrics(
    file_rows: &[FileMetricsRow],
    ledger: &ContributionLedger,
    bug_links: &BugLinkTable,
    thresholds: &Thresholds,
) -> Vec<DirectoryMetricsRow> {
    let mut groups: BTreeMap<&str, Vec<&FileMetricsRow>> = BTreeMap::new();
    for row in file_rows {
        groups.entry(directory_of(&row.path)).or_default().push(row);
    }

    let mut out = Vec::with_capacity(groups.len());
    for (dir, rows) in groups {
        let n = rows.len() as f64;

        let mut pooled: BTreeMap<&str, u64> = BTreeMap::new();
        let mut bugs: BTreeSet<&str> = BTreeSet::new();
        for r in &rows {
            if let Some(devs) = ledger.artifact(&r.path) {
                for (d, c) in devs {
                    *pooled.entry(d.as_str()).or_default() += c;
                }
            }
            if let Some(keys) = bug_links.bugs_of(&r.path) {
                bugs.extend(keys.iter().map(String::as_str));
            }
        }
        pooled.retain(|_, c| *c > 0);
        let all: u64 = pooled.values().sum();
        let shares: Vec<f64> = if all == 0 {
            Vec::new()
        } else {
            pooled.values().map(|c| *c as f64 / all as f64).collect()
        };
        let contributors = shares.len() as f64;
        let frac = |pred: &dyn Fn(f64) -> bool| {
            if shares.is_empty() {
                0.0
            } else {
                shares.iter().filter(|s| pred(**s)).count() as f64 / contributors
            }
        };

        let ownerships = rows.iter().map(|r| r.ownership);
        out.push(DirectoryMetricsRow {
            dir: dir.to_string(),
            avgownership: rows.iter().map(|r| r.ownership).sum::<f64>() / n,
            ownershipdir: shares.iter().copied().fold(0.0, f64::max),
            minownerdir: shares.iter().copied().reduce(f64::min).unwrap_or(0.0),
            avgcontributors: rows.iter().map(|r| r.total as f64).sum::<f64>() / n,
            pcminors: frac(&|s| s < thresholds.weak_pct),
            pcminimals: frac(&|s| s < thresholds.minimal_pct),
            pcmajors: frac(&|s| s >= thresholds.weak_pct),
            avgminimals: rows.iter().map(|r| r.minimals as f64).sum::<f64>() / n,
            avgminors: rows.iter().map(|r| r.minors_50 as f64).sum::<f64>() / n,
            minownedfile: ownerships.clone().reduce(f64::min).unwrap_or(0.0),
            weakowned: ownerships.filter(|o| *o < thresholds.weak_pct).count() as f64 / n,
            bug_count: bugs.len(),
            n_files: rows.len(),
        });
    }
    out
}
