//! Analysis configuration, read from TOML (or JSON by file extension).

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::exec::Execution;
use crate::ingest::{IssuePatterns, HASH_PATTERN, JIRA_PATTERN};
use crate::learn::{EvalParams, ForestParams};
use crate::ownership::{ContributionUnit, Thresholds};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Md,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" => Ok(Format::Md),
            other => Err(format!("unknown format `{other}` (expected csv, json or md)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default = "yes")]
    pub run_regression: bool,
    #[serde(default = "yes")]
    pub run_classifier: bool,
    #[serde(default = "yes")]
    pub pca_enabled: bool,
}

fn yes() -> bool {
    true
}

impl Default for Flags {
    fn default() -> Self {
        Self { run_regression: true, run_classifier: true, pca_enabled: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierConfig {
    #[serde(default = "default_trees")]
    pub n_trees: usize,
    #[serde(default = "default_min_leaf")]
    pub min_leaf: usize,
    #[serde(default)]
    pub max_features: Option<usize>,
    #[serde(default = "yes")]
    pub bootstrap: bool,
    #[serde(default = "default_target")]
    pub variance_target: f64,
    #[serde(default = "default_folds")]
    pub folds: usize,
}

fn default_trees() -> usize {
    100
}
fn default_min_leaf() -> usize {
    1
}
fn default_target() -> f64 {
    0.95
}
fn default_folds() -> usize {
    10
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            n_trees: default_trees(),
            min_leaf: default_min_leaf(),
            max_features: None,
            bootstrap: true,
            variance_target: default_target(),
            folds: default_folds(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub name: String,
    /// JSON-lines commit journal.
    #[serde(default)]
    pub journal: Option<PathBuf>,
    /// `git log --numstat` output, used when no journal is given.
    #[serde(default)]
    pub numstat: Option<PathBuf>,
    #[serde(default)]
    pub issues: Option<PathBuf>,
    /// Checkout root holding current file contents (LOC, complexity).
    #[serde(default)]
    pub sources: Option<PathBuf>,
    /// CSV with `path,complexity` columns overriding the estimator.
    #[serde(default)]
    pub complexity: Option<PathBuf>,
    #[serde(default)]
    pub include: Vec<String>,
    #[serde(default)]
    pub exclude: Vec<String>,
    /// Author alias → canonical identity.
    #[serde(default)]
    pub identities: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub unit: ContributionUnit,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: BTreeSet<Format>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default)]
    pub classifier: ClassifierConfig,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_patterns")]
    pub issue_patterns: Vec<String>,
    #[serde(default = "default_aliases")]
    pub bug_aliases: Vec<String>,
    #[serde(default)]
    pub execution: Execution,
    pub projects: Vec<ProjectConfig>,
    /// Directory relative input paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}
fn default_output() -> PathBuf {
    PathBuf::from("ownlab-out")
}
fn default_formats() -> BTreeSet<Format> {
    [Format::Csv, Format::Md].into_iter().collect()
}
fn default_alpha() -> f64 {
    crate::stats::DEFAULT_ALPHA
}
fn default_patterns() -> Vec<String> {
    vec![JIRA_PATTERN.to_string(), HASH_PATTERN.to_string()]
}
fn default_aliases() -> Vec<String> {
    vec!["bug".into(), "defect".into()]
}

fn invalid(key: &str, message: impl Into<String>) -> PipelineError {
    PipelineError::Config { key: key.to_string(), message: message.into() }
}

impl AnalysisConfig {
    /// Parses TOML text; relative paths resolve against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut cfg: AnalysisConfig =
            toml::from_str(text).map_err(|e| PipelineError::ConfigParse(e.message().to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut cfg: AnalysisConfig =
            serde_json::from_str(text).map_err(|e| PipelineError::ConfigParse(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.version != CONFIG_VERSION {
            return Err(invalid("version", format!("unsupported version {}, expected {CONFIG_VERSION}", self.version)));
        }
        self.thresholds
            .validate()
            .map_err(|e| invalid("thresholds", e.to_string()))?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha", "must lie in (0, 1)"));
        }
        if self.formats.is_empty() {
            return Err(invalid("formats", "at least one format is required"));
        }
        IssuePatterns::new(&self.issue_patterns).map_err(|e| invalid("issue_patterns", e.to_string()))?;
        let c = &self.classifier;
        if c.n_trees == 0 {
            return Err(invalid("classifier.n_trees", "must be at least 1"));
        }
        if c.min_leaf == 0 {
            return Err(invalid("classifier.min_leaf", "must be at least 1"));
        }
        if !(c.variance_target > 0.0 && c.variance_target <= 1.0) {
            return Err(invalid("classifier.variance_target", "must lie in (0, 1]"));
        }
        if self.projects.is_empty() {
            return Err(invalid("projects", "at least one project is required"));
        }
        let mut names = BTreeSet::new();
        for p in &self.projects {
            if p.name.trim().is_empty() {
                return Err(invalid("projects.name", "must not be empty"));
            }
            if !names.insert(p.name.as_str()) {
                return Err(invalid("projects.name", format!("duplicate project name `{}`", p.name)));
            }
            match (&p.journal, &p.numstat) {
                (Some(_), Some(_)) => {
                    return Err(invalid("projects.journal", format!("`{}` sets both journal and numstat", p.name)))
                }
                (None, None) => {
                    return Err(invalid("projects.journal", format!("`{}` needs a journal or numstat path", p.name)))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn eval_params(&self) -> EvalParams {
        let c = &self.classifier;
        EvalParams {
            forest: ForestParams {
                n_trees: c.n_trees,
                min_leaf: c.min_leaf,
                max_features: c.max_features,
                bootstrap: c.bootstrap,
                execution: self.execution,
            },
            pca_enabled: self.flags.pca_enabled,
            variance_target: c.variance_target,
            folds: c.folds,
        }
    }
}

/// Reads a config file. `.json` files are parsed as JSON, anything else as
/// TOML.
pub fn load_config(path: &Path) -> Result<AnalysisConfig, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        AnalysisConfig::from_json(&text, &base)
    } else {
        AnalysisConfig::from_toml(&text, &base)
    }
}
