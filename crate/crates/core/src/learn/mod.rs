//! Classification track: standardization, PCA, a random forest defect
//! classifier, holdout / k-fold evaluation and impurity importances.

mod evaluate;
mod forest;
mod pca;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use evaluate::{
    evaluate, fit_pipeline, holdout_split, stratified_folds, EvalParams, EvalReport, TrainedPipeline,
};
pub use forest::{forest_predict, mdi_importance, train_forest, ForestModel, ForestParams, ImportanceRow, Node, Tree};
pub use pca::{pca_fit, pca_inverse_transform, pca_transform, standardize, PcaModel, Standardized};

#[derive(Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("training data has a single class")]
    SingleClass,
    #[error("row width {got} does not match the {expected} trained features")]
    WidthMismatch { expected: usize, got: usize },
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("each class needs at least {needed} rows for a stratified split (smallest has {got})")]
    InsufficientClassRows { needed: usize, got: usize },
    #[error("labels ({labels}) and rows ({rows}) differ in length")]
    LabelMismatch { labels: usize, rows: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    File,
    Directory,
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Level::File => "file",
            Level::Directory => "directory",
        })
    }
}

/// Labelled feature rows; `true` marks a defective artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
    pub level: Level,
}

impl Dataset {
    pub fn new(features: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<bool>, level: Level) -> Result<Self, LearnError> {
        if labels.len() != rows.len() {
            return Err(LearnError::LabelMismatch { labels: labels.len(), rows: rows.len() });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != features.len()) {
            return Err(LearnError::WidthMismatch { expected: features.len(), got: r.len() });
        }
        Ok(Self { features, rows, labels, level })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|l| **l).count();
        (self.labels.len() - pos, pos)
    }

    pub fn positive_rate(&self) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            self.class_counts().1 as f64 / self.labels.len() as f64
        }
    }

    /// Subset by row indices, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            features: self.features.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            level: self.level,
        }
    }
}
