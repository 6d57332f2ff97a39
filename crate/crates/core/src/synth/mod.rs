//! Seeded synthetic commit histories with known ground truth, plus naive
//! oracle evaluations of the ownership metrics for cross-checking.

mod oracle;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{emit_commit_journal, CommitRecord, FileChange};
use crate::rng::{mix_seed, SeededRng};

pub use oracle::{oracle_dir_metrics, oracle_file_metrics};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("range `{field}` is empty or starts below {min}")]
    BadRange { field: &'static str, min: u64 },
    #[error("concentration must be positive and finite")]
    Concentration,
    #[error("flip_noise must lie in [0, 0.5)")]
    FlipNoise,
    #[error("n_devs must be at least 1")]
    NoDevelopers,
    #[error("unknown defect-rule metric `{0}`")]
    UnknownMetric(String),
}

/// Inclusive integer range written as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span(pub u64, pub u64);

impl Span {
    fn check(self, field: &'static str, min: u64) -> Result<(), SynthError> {
        if self.0 < min || self.0 > self.1 {
            Err(SynthError::BadRange { field, min })
        } else {
            Ok(())
        }
    }

    fn draw(self, rng: &mut SeededRng) -> u64 {
        rng.range_inclusive(self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectRule {
    /// Any file metric name, e.g. `total` or `ownership`.
    pub metric: String,
    /// Files whose metric is strictly above this value are defective.
    pub threshold: f64,
    #[serde(default)]
    pub flip_noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub n_dirs: Span,
    pub files_per_dir: Span,
    pub n_devs: usize,
    pub commits_per_file: Span,
    /// Ownership skew. Near 0 spreads work evenly; large values leave one
    /// dominant contributor per file.
    pub concentration: f64,
    pub churn_per_commit: Span,
    /// Largest number of files a generated commit may touch.
    #[serde(default = "default_files_per_commit")]
    pub max_files_per_commit: usize,
    /// Chance that a commit message also references a non-bug task.
    #[serde(default)]
    pub task_ref_rate: f64,
    #[serde(default)]
    pub defect_rule: Option<DefectRule>,
}

fn default_files_per_commit() -> usize {
    3
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_dirs: Span(1, 3),
            files_per_dir: Span(1, 4),
            n_devs: 4,
            commits_per_file: Span(1, 8),
            concentration: 3.0,
            churn_per_commit: Span(1, 40),
            max_files_per_commit: default_files_per_commit(),
            task_ref_rate: 0.0,
            defect_rule: None,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        self.n_dirs.check("n_dirs", 1)?;
        self.files_per_dir.check("files_per_dir", 1)?;
        self.commits_per_file.check("commits_per_file", 1)?;
        self.churn_per_commit.check("churn_per_commit", 0)?;
        if self.n_devs == 0 {
            return Err(SynthError::NoDevelopers);
        }
        if !(self.concentration > 0.0 && self.concentration.is_finite()) {
            return Err(SynthError::Concentration);
        }
        if let Some(rule) = &self.defect_rule {
            validate_rule(rule)?;
        }
        Ok(())
    }
}

fn validate_rule(rule: &DefectRule) -> Result<(), SynthError> {
    if !(0.0..0.5).contains(&rule.flip_noise) {
        return Err(SynthError::FlipNoise);
    }
    if !crate::ownership::FileMetricsRow::METRICS.contains(&rule.metric.as_str()) {
        return Err(SynthError::UnknownMetric(rule.metric.clone()));
    }
    Ok(())
}

/// Per-developer contribution to one file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DevTruth {
    pub commits: u64,
    pub churn: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthIssue {
    pub key: String,
    #[serde(rename = "type")]
    pub kind: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub files: BTreeMap<String, BTreeMap<String, DevTruth>>,
    pub bugs: BTreeMap<String, BTreeSet<String>>,
    pub developers: BTreeSet<String>,
    pub commits: Vec<CommitRecord>,
    pub issues: Vec<SynthIssue>,
}

impl GroundTruth {
    pub fn journal(&self) -> String {
        emit_commit_journal(&self.commits)
    }

    /// Issue export as a JSON array of `{key, type}` objects.
    pub fn issue_export(&self) -> String {
        serde_json::to_string_pretty(&self.issues).expect("issues serialize") + "\n"
    }
}

const BASE_TIME: i64 = 1_600_000_000;

fn commit_hash(seed: u64, i: usize) -> String {
    format!(
        "{:016x}{:016x}{:08x}",
        mix_seed(seed, 2 * i as u64),
        mix_seed(seed, 2 * i as u64 + 1),
        i as u32
    )
}

struct Event {
    path: String,
    added: u64,
    deleted: u64,
}

/// Draws a history for `spec`. Returns the journal text and the truth it
/// was built from.
pub fn generate_history(spec: &SynthSpec, seed: u64) -> Result<(String, GroundTruth), SynthError> {
    spec.validate()?;
    let mut rng = SeededRng::new(seed);
    let devs: Vec<String> = (0..spec.n_devs).map(|k| format!("dev{k}@synth.test")).collect();
    let mut truth = GroundTruth::default();
    let mut per_dev: Vec<Vec<Event>> = (0..spec.n_devs).map(|_| Vec::new()).collect();

    let n_dirs = spec.n_dirs.draw(&mut rng);
    for d in 0..n_dirs {
        let n_files = spec.files_per_dir.draw(&mut rng);
        for f in 0..n_files {
            let path = format!("src/d{d}/F{f}.java");
            let weights: Vec<f64> = (0..spec.n_devs)
                .map(|_| (spec.concentration * (rng.unit() - 1.0)).exp())
                .collect();
            let n_commits = spec.commits_per_file.draw(&mut rng);
            let entry = truth.files.entry(path.clone()).or_default();
            for _ in 0..n_commits {
                let k = rng.weighted_index(&weights);
                let churn = spec.churn_per_commit.draw(&mut rng);
                let deleted = rng.range_inclusive(0, churn / 2);
                let t = entry.entry(devs[k].clone()).or_default();
                t.commits += 1;
                t.churn += churn;
                per_dev[k].push(Event { path: path.clone(), added: churn - deleted, deleted });
            }
        }
    }

    // Pack each developer's events into commits that never repeat a path.
    let mut pending: Vec<(usize, Vec<Event>)> = Vec::new();
    for (k, mut events) in per_dev.into_iter().enumerate() {
        rng.shuffle(&mut events);
        let mut iter = events.into_iter().peekable();
        while let Some(first) = iter.next() {
            let size = rng.range_inclusive(1, spec.max_files_per_commit.max(1) as u64) as usize;
            let mut batch = vec![first];
            while batch.len() < size {
                match iter.peek() {
                    Some(e) if !batch.iter().any(|b| b.path == e.path) => batch.push(iter.next().unwrap()),
                    _ => break,
                }
            }
            pending.push((k, batch));
        }
    }
    rng.shuffle(&mut pending);

    let mut task = 0;
    for (i, (k, batch)) in pending.into_iter().enumerate() {
        let mut message = format!("change {} file(s)", batch.len());
        if spec.task_ref_rate > 0.0 && rng.bernoulli(spec.task_ref_rate) {
            task += 1;
            let key = format!("TASK-{task}");
            message.push_str(&format!(" ({key})"));
            truth.issues.push(SynthIssue { key, kind: "Task".into() });
        }
        truth.developers.insert(devs[k].clone());
        truth.commits.push(CommitRecord {
            hash: commit_hash(seed, i),
            author: devs[k].clone(),
            timestamp: BASE_TIME + 3600 * i as i64,
            message,
            changes: batch.into_iter().map(|e| FileChange::text(e.path, e.added, e.deleted)).collect(),
        });
    }

    if let Some(rule) = &spec.defect_rule {
        plant_defects(&mut truth, rule, mix_seed(seed, u64::MAX))?;
    }
    Ok((truth.journal(), truth))
}

/// Marks files matching `rule` (each label flipped with probability
/// `flip_noise`) as defective. Every defective file gets a fresh bug key
/// and a fix commit by its top contributor that references it. Returns
/// the issue export and the `(commit hash, key)` references added.
pub fn plant_defects(
    truth: &mut GroundTruth,
    rule: &DefectRule,
    seed: u64,
) -> Result<(String, Vec<(String, String)>), SynthError> {
    validate_rule(rule)?;
    let rows = oracle_file_metrics(truth, &crate::ownership::Thresholds::default(), crate::ownership::ContributionUnit::Commits);
    let mut rng = SeededRng::new(seed);
    let mut refs = Vec::new();
    let first_bug = truth.bugs.values().map(BTreeSet::len).sum::<usize>() + 1;
    let mut next_ts = truth.commits.iter().map(|c| c.timestamp).max().unwrap_or(BASE_TIME) + 3600;
    for row in rows {
        let hit = row.value(&rule.metric).unwrap_or(0.0) > rule.threshold;
        let flip = rule.flip_noise > 0.0 && rng.bernoulli(rule.flip_noise);
        if hit == flip {
            continue;
        }
        let key = format!("BUG-{}", first_bug + refs.len());
        let devs = &truth.files[&row.path];
        // Top contributor; ties go to the first name in order.
        let owner = devs
            .iter()
            .fold(None::<(&String, u64)>, |best, (d, t)| match best {
                Some((_, c)) if c >= t.commits => best,
                _ => Some((d, t.commits)),
            })
            .map(|(d, _)| d.clone())
            .expect("file has a contributor");
        let hash = commit_hash(seed, truth.commits.len());
        truth.commits.push(CommitRecord {
            hash: hash.clone(),
            author: owner.clone(),
            timestamp: next_ts,
            message: format!("fix {key}"),
            changes: vec![FileChange::text(row.path.clone(), 1, 1)],
        });
        next_ts += 3600;
        let t = truth.files.get_mut(&row.path).unwrap().get_mut(&owner).unwrap();
        t.commits += 1;
        t.churn += 2;
        truth.bugs.entry(row.path.clone()).or_default().insert(key.clone());
        truth.issues.push(SynthIssue { key: key.clone(), kind: "Bug".into() });
        refs.push((hash, key));
    }
    Ok((truth.issue_export(), refs))
}
