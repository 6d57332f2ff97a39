//! Brute-force metric evaluation straight from ground-truth counts. Shares
//! only the row types with the ownership module.

use std::collections::{BTreeMap, BTreeSet};

use super::GroundTruth;
use crate::ownership::{ContributionUnit, DirectoryMetricsRow, FileMetricsRow, Thresholds};

fn amounts(devs: &BTreeMap<String, super::DevTruth>, unit: ContributionUnit) -> Vec<(String, u64)> {
    let mut out = Vec::new();
    for (name, t) in devs {
        let amount = match unit {
            ContributionUnit::Commits => t.commits,
            ContributionUnit::Churn => t.churn,
        };
        if amount > 0 {
            out.push((name.clone(), amount));
        }
    }
    out
}

fn count_where(shares: &[f64], keep: impl Fn(f64) -> bool) -> usize {
    let mut n = 0;
    for s in shares {
        if keep(*s) {
            n += 1;
        }
    }
    n
}

pub fn oracle_file_metrics(truth: &GroundTruth, thresholds: &Thresholds, unit: ContributionUnit) -> Vec<FileMetricsRow> {
    let mut rows = Vec::new();
    for (path, devs) in &truth.files {
        let contributions = amounts(devs, unit);
        let sum: u64 = contributions.iter().map(|c| c.1).sum();
        if sum == 0 {
            continue;
        }
        let shares: Vec<f64> = contributions.iter().map(|c| c.1 as f64 / sum as f64).collect();
        let mut top = 0.0;
        for s in &shares {
            if *s > top {
                top = *s;
            }
        }
        let mut touches = 0;
        let mut churn = 0;
        for t in devs.values() {
            touches += t.commits as usize;
            churn += t.churn;
        }
        rows.push(FileMetricsRow {
            path: path.clone(),
            ownership: top,
            major: count_where(&shares, |s| s >= thresholds.minor_pct),
            minors_5: count_where(&shares, |s| s < thresholds.minor_pct),
            minors_50: count_where(&shares, |s| s < thresholds.weak_pct),
            minimals: count_where(&shares, |s| s < thresholds.minimal_pct),
            total: shares.len(),
            touches,
            churn,
            size_loc: 0,
            complexity: 0,
            bug_count: truth.bugs.get(path).map_or(0, BTreeSet::len),
        });
    }
    rows
}

pub fn oracle_dir_metrics(truth: &GroundTruth, thresholds: &Thresholds, unit: ContributionUnit) -> Vec<DirectoryMetricsRow> {
    let files = oracle_file_metrics(truth, thresholds, unit);
    let mut dirs: BTreeMap<String, Vec<&FileMetricsRow>> = BTreeMap::new();
    for f in &files {
        let parts: Vec<&str> = f.path.split('/').collect();
        let dir = if parts.len() == 1 { ".".to_string() } else { parts[..parts.len() - 1].join("/") };
        dirs.entry(dir).or_default().push(f);
    }

    let mut out = Vec::new();
    for (dir, members) in dirs {
        let n = members.len() as f64;
        let mut pooled: BTreeMap<String, u64> = BTreeMap::new();
        let mut bugs = BTreeSet::new();
        for f in &members {
            for (name, amount) in amounts(&truth.files[&f.path], unit) {
                *pooled.entry(name).or_insert(0) += amount;
            }
            if let Some(keys) = truth.bugs.get(&f.path) {
                bugs.extend(keys.iter().cloned());
            }
        }
        let sum: u64 = pooled.values().sum();
        let shares: Vec<f64> = pooled.values().map(|c| *c as f64 / sum as f64).collect();
        let k = shares.len() as f64;

        let mut hi = 0.0f64;
        let mut lo = 1.0f64;
        for s in &shares {
            hi = hi.max(*s);
            lo = lo.min(*s);
        }
        let mut own_sum = 0.0;
        let mut own_min = f64::INFINITY;
        let mut weak = 0;
        let (mut contributors, mut minimals, mut minors) = (0.0, 0.0, 0.0);
        for f in &members {
            own_sum += f.ownership;
            own_min = own_min.min(f.ownership);
            if f.ownership < thresholds.weak_pct {
                weak += 1;
            }
            contributors += f.total as f64;
            minimals += f.minimals as f64;
            minors += f.minors_50 as f64;
        }
        out.push(DirectoryMetricsRow {
            dir,
            avgownership: own_sum / n,
            ownershipdir: hi,
            minownerdir: lo,
            avgcontributors: contributors / n,
            pcminors: count_where(&shares, |s| s < thresholds.weak_pct) as f64 / k,
            pcminimals: count_where(&shares, |s| s < thresholds.minimal_pct) as f64 / k,
            pcmajors: count_where(&shares, |s| s >= thresholds.weak_pct) as f64 / k,
            avgminimals: minimals / n,
            avgminors: minors / n,
            minownedfile: own_min,
            weakowned: weak as f64 / n,
            bug_count: bugs.len(),
            n_files: members.len(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::DevTruth;

    fn truth(files: &[(&str, &[(&str, u64)])]) -> GroundTruth {
        let mut t = GroundTruth::default();
        for (path, devs) in files {
            let entry = t.files.entry(path.to_string()).or_default();
            for (d, c) in *devs {
                entry.insert(d.to_string(), DevTruth { commits: *c, churn: 3 * c });
            }
        }
        t
    }

    #[test]
    fn eight_two() {
        let t = truth(&[("a/x", &[("A", 8), ("B", 2)])]);
        let r = &oracle_file_metrics(&t, &Thresholds::default(), ContributionUnit::Commits)[0];
        assert_eq!(r.ownership, 0.8);
        assert_eq!((r.total, r.major, r.minors_50, r.minimals), (2, 2, 1, 0));
        assert_eq!(r.touches, 10);
    }

    #[test]
    fn single_commit_single_dev() {
        let t = truth(&[("x", &[("A", 1)])]);
        let r = &oracle_file_metrics(&t, &Thresholds::default(), ContributionUnit::Commits)[0];
        assert_eq!((r.touches, r.total, r.ownership), (1, 1, 1.0));
        let d = &oracle_dir_metrics(&t, &Thresholds::default(), ContributionUnit::Commits)[0];
        assert_eq!(d.dir, ".");
    }
}
