//! LMG (Shapley) decomposition of R² over predictors.

use std::collections::BTreeMap;

use super::ols::ols_fit;
use super::{Observations, StatsError};
use crate::exec::Execution;

/// Exhaustive enumeration limit (2^12 subset fits).
pub const MAX_LMG_PREDICTORS: usize = 12;

fn subset_r2(data: &Observations, predictors: &[String], y: &[f64], mask: usize) -> Result<f64, StatsError> {
    if mask == 0 {
        return Ok(0.0);
    }
    let names: Vec<String> = predictors
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, n)| n.clone())
        .collect();
    let x = data.select(&names)?;
    Ok(ols_fit(&names, &x, y)?.r2)
}

/// Each predictor's R² increment averaged over all orderings of entry.
/// Shares sum to the full-model R².
pub fn lmg_importance(
    data: &Observations,
    predictors: &[&str],
    target: &str,
    exec: Execution,
) -> Result<BTreeMap<String, f64>, StatsError> {
    let p = predictors.len();
    if p > MAX_LMG_PREDICTORS {
        return Err(StatsError::TooManyPredictors(p));
    }
    let y = data.column(target)?;
    let names: Vec<String> = predictors.iter().map(|s| s.to_string()).collect();
    for n in &names {
        data.index_of(n)?;
    }
    if data.len() <= p + 1 {
        return Err(StatsError::InsufficientData { n: data.len(), p });
    }
    let r2: Vec<f64> = exec
        .map_range(1 << p, |mask| subset_r2(data, &names, &y, mask))
        .into_iter()
        .collect::<Result<_, _>>()?;

    // weight(s) = s! (p − s − 1)! / p!
    let mut fact = vec![1.0f64; p + 1];
    for i in 1..=p {
        fact[i] = fact[i - 1] * i as f64;
    }
    let mut shares = BTreeMap::new();
    for (j, name) in names.iter().enumerate() {
        let bit = 1usize << j;
        let mut share = 0.0;
        for mask in 0..(1usize << p) {
            if mask & bit != 0 {
                continue;
            }
            let s = mask.count_ones() as usize;
            let w = fact[s] * fact[p - s - 1] / fact[p];
            share += w * (r2[mask | bit] - r2[mask]);
        }
        shares.insert(name.clone(), share);
    }
    Ok(shares)
}
