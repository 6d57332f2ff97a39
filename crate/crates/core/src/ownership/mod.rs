//! Ownership weights and the file/directory ownership metrics.

mod code;
mod directory;
mod file;
mod ledger;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use code::{count_loc, estimate_complexity};
pub use directory::{directory_metrics, directory_of, DirectoryMetricsRow};
pub use file::{file_metrics, CodeInputs, FileMetricsRow};
pub use ledger::{
    contribution_ledger, dedicated_owner, is_collective, ownership_vector, ContributionLedger,
    ContributionUnit, OwnershipVector,
};

#[derive(Debug, Error, PartialEq)]
pub enum OwnershipError {
    #[error("artifact `{0}` has no contributions; ownership is undefined")]
    UndefinedOwnership(String),
    #[error("invalid thresholds: need 0 < minor ({minor}) <= minimal ({minimal}) <= weak ({weak}) < 1")]
    InvalidThresholds { minor: f64, minimal: f64, weak: f64 },
}

/// Contributor share cut-offs.
///
/// A developer whose weight is at or above a cut-off is on the "major" side
/// of it; strictly below is the "minor" side. Defaults: 5% (minor),
/// 20% (minimal), 50% (weak ownership / Greiler minors).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default = "default_minor")]
    pub minor_pct: f64,
    #[serde(default = "default_minimal")]
    pub minimal_pct: f64,
    #[serde(default = "default_weak")]
    pub weak_pct: f64,
}

fn default_minor() -> f64 {
    0.05
}
fn default_minimal() -> f64 {
    0.20
}
fn default_weak() -> f64 {
    0.50
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            minor_pct: default_minor(),
            minimal_pct: default_minimal(),
            weak_pct: default_weak(),
        }
    }
}

impl Thresholds {
    pub fn new(minor_pct: f64, minimal_pct: f64, weak_pct: f64) -> Result<Self, OwnershipError> {
        let t = Self {
            minor_pct,
            minimal_pct,
            weak_pct,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), OwnershipError> {
        let ok = 0.0 < self.minor_pct
            && self.minor_pct <= self.minimal_pct
            && self.minimal_pct <= self.weak_pct
            && self.weak_pct < 1.0;
        if ok {
            Ok(())
        } else {
            Err(OwnershipError::InvalidThresholds {
                minor: self.minor_pct,
                minimal: self.minimal_pct,
                weak: self.weak_pct,
            })
        }
    }
}
