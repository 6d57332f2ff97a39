//! Ordinary least squares via Householder QR, with rank-deficient columns
//! dropped, and the nested-model F-test.

use serde::{Deserialize, Serialize};

use super::special::f_survival;
use super::StatsError;

/// A column whose norm after projecting out the retained columns falls
/// below this fraction of its original norm is treated as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    /// Predictors as requested, in design order.
    pub predictors: Vec<String>,
    /// Predictors kept after the rank check.
    pub retained: Vec<String>,
    /// Predictors dropped as linearly dependent (including constants,
    /// which are dependent on the intercept).
    pub dropped: Vec<String>,
    /// Intercept first, then one coefficient per retained predictor.
    pub coefficients: Vec<f64>,
    pub r2: f64,
    pub n: usize,
    /// Number of retained predictors.
    pub p: usize,
    pub sse: f64,
    pub sst: f64,
}

impl RegressionFit {
    /// Fitted value for a row given in requested-predictor order.
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut y = self.coefficients[0];
        let mut k = 1;
        for (name, x) in self.predictors.iter().zip(row) {
            if self.retained.contains(name) {
                y += self.coefficients[k] * x;
                k += 1;
            }
        }
        y
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Reflector {
    start: usize,
    v: Vec<f64>,
    beta: f64,
}

impl Reflector {
    fn apply(&self, col: &mut [f64]) {
        let tail = &mut col[self.start..];
        let s = self.beta * dot(&self.v, tail);
        for (t, v) in tail.iter_mut().zip(&self.v) {
            *t -= s * v;
        }
    }
}

/// Least-squares fit of `y` on an intercept plus the columns of `x`
/// (row-major, one row per observation, columns named by `names`).
pub fn ols_fit(names: &[String], x: &[Vec<f64>], y: &[f64]) -> Result<RegressionFit, StatsError> {
    let n = y.len();
    let p = names.len();
    if x.len() != n {
        return Err(StatsError::LengthMismatch(x.len(), n));
    }
    for (i, r) in x.iter().enumerate() {
        if r.len() != p {
            return Err(StatsError::RaggedRow { row: i, got: r.len(), expected: p });
        }
    }
    if n <= p + 1 {
        return Err(StatsError::InsufficientData { n, p });
    }
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    if sst == 0.0 {
        return Err(StatsError::ConstantResponse);
    }

    // Column-major design with the intercept first.
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(p + 1);
    columns.push(vec![1.0; n]);
    for j in 0..p {
        columns.push(x.iter().map(|r| r[j]).collect());
    }

    let mut reflectors: Vec<Reflector> = Vec::new();
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut dropped = Vec::new();
    for (j, original) in columns.iter().enumerate() {
        let k = reflectors.len();
        let orig_norm = dot(original, original).sqrt();
        let mut col = original.clone();
        for h in &reflectors {
            h.apply(&mut col);
        }
        let tail_norm = dot(&col[k..], &col[k..]).sqrt();
        if k >= n || orig_norm == 0.0 || tail_norm <= RANK_TOLERANCE * orig_norm {
            if j == 0 {
                unreachable!("intercept column is never dependent");
            }
            dropped.push(names[j - 1].clone());
            continue;
        }
        let alpha = if col[k] > 0.0 { -tail_norm } else { tail_norm };
        let mut v = col[k..].to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        let reflector = Reflector { start: k, v, beta: 2.0 / vv };
        let mut r = col[..k].to_vec();
        r.push(alpha);
        r_cols.push(r);
        reflectors.push(reflector);
        kept.push(j);
    }

    let mut qty = y.to_vec();
    for h in &reflectors {
        h.apply(&mut qty);
    }
    let rank = kept.len();
    let mut beta = vec![0.0; rank];
    for i in (0..rank).rev() {
        let mut s = qty[i];
        for (c, b) in beta.iter().enumerate().take(rank).skip(i + 1) {
            s -= r_cols[c][i] * b;
        }
        beta[i] = s / r_cols[i][i];
    }

    let mut sse = 0.0;
    for i in 0..n {
        let fitted: f64 = kept.iter().zip(&beta).map(|(&j, b)| columns[j][i] * b).sum();
        sse += (y[i] - fitted).powi(2);
    }
    let r2 = (1.0 - sse / sst).clamp(0.0, 1.0);
    Ok(RegressionFit {
        predictors: names.to_vec(),
        retained: kept.iter().skip(1).map(|&j| names[j - 1].clone()).collect(),
        dropped,
        coefficients: beta,
        r2,
        n,
        p: rank - 1,
        sse,
        sst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FTestResult {
    pub f_stat: f64,
    pub df1: f64,
    pub df2: f64,
    pub p_value: f64,
    pub significant: bool,
    /// The larger model fits exactly (R² = 1), so F is unbounded.
    pub degenerate: bool,
}

/// Goodness-of-fit F-test for the R² gain of `big` over nested `small`.
pub fn nested_f_test(small: &RegressionFit, big: &RegressionFit, alpha: f64) -> Result<FTestResult, StatsError> {
    if small.n != big.n {
        return Err(StatsError::NotNested(format!("n differs ({} vs {})", small.n, big.n)));
    }
    if let Some(extra) = small.predictors.iter().find(|p| !big.predictors.contains(p)) {
        return Err(StatsError::NotNested(format!("`{extra}` missing from the larger model")));
    }
    if big.predictors.len() <= small.predictors.len() {
        return Err(StatsError::NotNested("larger model adds no predictors".into()));
    }
    let df2 = (big.n - big.p - 1) as f64;
    let added = big.p.saturating_sub(small.p);
    let gain = big.r2 - small.r2;
    if added == 0 || gain <= 0.0 {
        return Ok(FTestResult {
            f_stat: 0.0,
            df1: added.max(1) as f64,
            df2,
            p_value: 1.0,
            significant: false,
            degenerate: false,
        });
    }
    let df1 = added as f64;
    if big.r2 >= 1.0 {
        return Ok(FTestResult {
            f_stat: f64::INFINITY,
            df1,
            df2,
            p_value: 0.0,
            significant: true,
            degenerate: true,
        });
    }
    let f = (gain / df1) / ((1.0 - big.r2) / df2);
    let p_value = f_survival(f, df1, df2);
    Ok(FTestResult {
        f_stat: f,
        df1,
        df2,
        p_value,
        significant: p_value < alpha,
        degenerate: false,
    })
}
