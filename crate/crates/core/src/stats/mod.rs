//! Regression-track statistics.

mod correlation;
mod lmg;
mod ols;
mod special;
mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use correlation::{correlation_table, spearman, CorrelationRow, CorrelationTable};
pub use lmg::{lmg_importance, MAX_LMG_PREDICTORS};
pub use ols::{nested_f_test, ols_fit, FTestResult, RegressionFit, RANK_TOLERANCE};
pub use special::{f_survival, ln_gamma, regularized_incomplete_beta};
pub use sweep::{regression_sweep, SweepCell, SweepModel, SweepRow, SweepTable, SWEEP_MODELS};

/// Default significance level for F-tests.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StatsError {
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("correlation undefined: `{0}` series is constant")]
    ConstantSeries(&'static str),
    #[error("insufficient data: {n} observations for {p} predictors (need n > p + 1)")]
    InsufficientData { n: usize, p: usize },
    #[error("response is constant; R² undefined")]
    ConstantResponse,
    #[error("models are not nested: {0}")]
    NotNested(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("{0} predictors exceed the exhaustive LMG limit of {MAX_LMG_PREDICTORS}; use a sampling estimator instead")]
    TooManyPredictors(usize),
    #[error("row {row} has {got} values, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
}

/// A named numeric table: one column per metric, one row per observation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Observations {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Observations {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != columns.len() {
                return Err(StatsError::RaggedRow {
                    row: i,
                    got: r.len(),
                    expected: columns.len(),
                });
            }
        }
        Ok(Self { columns, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, StatsError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| StatsError::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, StatsError> {
        let i = self.index_of(name)?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Row-major design matrix for the named columns.
    pub fn select(&self, names: &[String]) -> Result<Vec<Vec<f64>>, StatsError> {
        let idx = names
            .iter()
            .map(|n| self.index_of(n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self
            .rows
            .iter()
            .map(|r| idx.iter().map(|&i| r[i]).collect())
            .collect())
    }

    pub fn is_constant(&self, name: &str) -> Result<bool, StatsError> {
        let col = self.column(name)?;
        Ok(col.windows(2).all(|w| w[0] == w[1]))
    }
}

/// Observations for one project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectData {
    pub name: String,
    pub data: Observations,
}
