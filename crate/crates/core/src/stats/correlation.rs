use serde::{Deserialize, Serialize};

use super::{ProjectData, StatsError};

/// Average ranks (1-based); tied values share the mean of their rank block.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

/// Spearman's ρ: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewObservations { needed: 3, got: x.len() });
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = rx.len() as f64;
    // Mean rank is (n+1)/2 regardless of ties.
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (dx, dy) = (a - mean, b - mean);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::ConstantSeries("x"));
    }
    if syy == 0.0 {
        return Err(StatsError::ConstantSeries("y"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: String,
    /// One cell per project; `None` where the correlation is undefined.
    pub cells: Vec<Option<f64>>,
    /// Mean over the defined cells.
    pub average: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub target: String,
    pub projects: Vec<String>,
    pub rows: Vec<CorrelationRow>,
    pub diagnostics: Vec<String>,
}

/// Spearman ρ of every metric against `target`, per project, plus the
/// unweighted cross-project average.
pub fn correlation_table(projects: &[ProjectData], metrics: &[&str], target: &str) -> CorrelationTable {
    let mut table = CorrelationTable {
        target: target.to_string(),
        projects: projects.iter().map(|p| p.name.clone()).collect(),
        ..Default::default()
    };
    let targets: Vec<Result<Vec<f64>, StatsError>> =
        projects.iter().map(|p| p.data.column(target)).collect();
    for metric in metrics {
        let mut cells = Vec::with_capacity(projects.len());
        for (p, y) in projects.iter().zip(&targets) {
            let cell = y
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|y| spearman(&p.data.column(metric)?, y));
            match cell {
                Ok(rho) => cells.push(Some(rho)),
                Err(e) => {
                    table
                        .diagnostics
                        .push(format!("{}: {metric} vs {target}: {e}", p.name));
                    cells.push(None);
                }
            }
        }
        let defined: Vec<f64> = cells.iter().flatten().copied().collect();
        let average = if defined.is_empty() {
            None
        } else {
            Some(defined.iter().sum::<f64>() / defined.len() as f64)
        };
        table.rows.push(CorrelationRow {
            metric: metric.to_string(),
            cells,
            average,
        });
    }
    table
}
