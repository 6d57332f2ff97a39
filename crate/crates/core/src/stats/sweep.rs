//! The nested regression sweep: code-metric base model, then ownership
//! predictors added one at a time, each gain tested against its
//! predecessor model.

use serde::{Deserialize, Serialize};

use super::ols::{nested_f_test, ols_fit, FTestResult, RegressionFit};
use super::{ProjectData, StatsError};
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepModel {
    pub name: &'static str,
    pub predictors: &'static [&'static str],
    /// Index of the model this one is compared against.
    pub predecessor: Option<usize>,
}

const BASE: [&str; 3] = ["size_loc", "churn", "complexity"];

/// The five models, in column order.
pub const SWEEP_MODELS: [SweepModel; 5] = [
    SweepModel {
        name: "Base",
        predictors: &BASE,
        predecessor: None,
    },
    SweepModel {
        name: "Base+total",
        predictors: &["size_loc", "churn", "complexity", "total"],
        predecessor: Some(0),
    },
    SweepModel {
        name: "Base+minor",
        predictors: &["size_loc", "churn", "complexity", "minors_5"],
        predecessor: Some(0),
    },
    SweepModel {
        name: "Base+minor+major",
        predictors: &["size_loc", "churn", "complexity", "minors_5", "major"],
        predecessor: Some(2),
    },
    SweepModel {
        name: "Base+minor+major+ownership",
        predictors: &["size_loc", "churn", "complexity", "minors_5", "major", "ownership"],
        predecessor: Some(3),
    },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub model: String,
    pub r2: f64,
    /// R² gain over the predecessor model.
    pub delta: Option<f64>,
    pub predecessor: Option<String>,
    pub f_test: Option<FTestResult>,
    pub significant: bool,
    pub fit: RegressionFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub project: String,
    pub n: usize,
    /// Predictors left out of every model because they are constant.
    pub excluded: Vec<String>,
    pub cells: Vec<SweepCell>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub models: Vec<String>,
    pub rows: Vec<SweepRow>,
    /// Unweighted mean R² per model over the projects in `rows`.
    pub averages: Vec<Option<f64>>,
    pub diagnostics: Vec<String>,
}

fn sweep_project(project: &ProjectData, target: &str, alpha: f64) -> Result<(SweepRow, Vec<String>), StatsError> {
    let mut notes = Vec::new();
    let mut all: Vec<&str> = Vec::new();
    for m in &SWEEP_MODELS {
        for p in m.predictors {
            if !all.contains(p) {
                all.push(p);
            }
        }
    }
    let mut excluded = Vec::new();
    for name in all {
        if project.data.is_constant(name)? {
            excluded.push(name.to_string());
        }
    }
    if !excluded.is_empty() {
        notes.push(format!(
            "{}: constant predictors excluded from regression: {}",
            project.name,
            excluded.join(", ")
        ));
    }
    let y = project.data.column(target)?;
    let largest = SWEEP_MODELS
        .iter()
        .map(|m| m.predictors.iter().filter(|p| !excluded.iter().any(|e| e == *p)).count())
        .max()
        .unwrap_or(0);
    if project.data.len() <= largest + 1 {
        return Err(StatsError::InsufficientData { n: project.data.len(), p: largest });
    }

    let mut cells: Vec<SweepCell> = Vec::with_capacity(SWEEP_MODELS.len());
    for model in &SWEEP_MODELS {
        let names: Vec<String> = model
            .predictors
            .iter()
            .filter(|p| !excluded.iter().any(|e| e == *p))
            .map(|p| p.to_string())
            .collect();
        let x = project.data.select(&names)?;
        let fit = ols_fit(&names, &x, &y)?;
        let (delta, f_test, predecessor) = match model.predecessor {
            Some(i) => {
                let prev = &cells[i];
                let test = if fit.predictors.len() > prev.fit.predictors.len() {
                    nested_f_test(&prev.fit, &fit, alpha)?
                } else {
                    // Added predictor was excluded: identical model.
                    FTestResult {
                        f_stat: 0.0,
                        df1: 1.0,
                        df2: (fit.n - fit.p - 1) as f64,
                        p_value: 1.0,
                        significant: false,
                        degenerate: false,
                    }
                };
                (Some(fit.r2 - prev.r2), Some(test), Some(prev.model.clone()))
            }
            None => (None, None, None),
        };
        cells.push(SweepCell {
            model: model.name.to_string(),
            r2: fit.r2,
            delta,
            significant: f_test.as_ref().is_some_and(|t| t.significant),
            predecessor,
            f_test,
            fit,
        });
    }
    Ok((
        SweepRow {
            project: project.name.clone(),
            n: project.data.len(),
            excluded,
            cells,
        },
        notes,
    ))
}

/// Runs the model chain for every project. Projects that cannot be fitted
/// are skipped with a diagnostic.
pub fn regression_sweep(projects: &[ProjectData], target: &str, alpha: f64, exec: Execution) -> SweepTable {
    let results = exec.map(projects, |p| sweep_project(p, target, alpha));
    let mut table = SweepTable {
        models: SWEEP_MODELS.iter().map(|m| m.name.to_string()).collect(),
        ..Default::default()
    };
    for (project, result) in projects.iter().zip(results) {
        match result {
            Ok((row, notes)) => {
                table.diagnostics.extend(notes);
                table.rows.push(row);
            }
            Err(e) => table
                .diagnostics
                .push(format!("{}: regression skipped: {e}", project.name)),
        }
    }
    table.averages = (0..SWEEP_MODELS.len())
        .map(|i| {
            if table.rows.is_empty() {
                None
            } else {
                Some(table.rows.iter().map(|r| r.cells[i].r2).sum::<f64>() / table.rows.len() as f64)
            }
        })
        .collect();
    table
}
