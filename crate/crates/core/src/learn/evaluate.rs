use serde::{Deserialize, Serialize};

use super::forest::{forest_predict, train_forest, ForestModel, ForestParams};
use super::pca::{pca_fit, pca_transform, PcaModel};
use super::{Dataset, Level, LearnError};
use crate::rng::{mix_seed, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalParams {
    #[serde(default)]
    pub forest: ForestParams,
    #[serde(default = "default_pca")]
    pub pca_enabled: bool,
    #[serde(default = "default_target")]
    pub variance_target: f64,
    #[serde(default = "default_folds")]
    pub folds: usize,
}

fn default_pca() -> bool {
    true
}
fn default_target() -> f64 {
    0.95
}
fn default_folds() -> usize {
    10
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            forest: ForestParams::default(),
            pca_enabled: default_pca(),
            variance_target: default_target(),
            folds: default_folds(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub level: Level,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub cv_f1_mean: Option<f64>,
    pub cv_f1_sd: Option<f64>,
    pub cv_folds: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub positive_rate: f64,
    /// Components kept by PCA in the holdout training split.
    pub pca_components: Option<usize>,
    pub diagnostics: Vec<String>,
}

/// Stratified split into (train, test); each class contributes
/// round(n_c / 3) rows to the test side.
pub fn holdout_split(labels: &[bool], seed: u64) -> Result<(Vec<usize>, Vec<usize>), LearnError> {
    let mut rng = SeededRng::new(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < 2 {
            return Err(LearnError::InsufficientClassRows { needed: 2, got: idx.len() });
        }
        rng.shuffle(&mut idx);
        let k = (idx.len() as f64 / 3.0).round() as usize;
        test.extend_from_slice(&idx[..k]);
        train.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Test-index sets of `k` stratified folds.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, LearnError> {
    let mut rng = SeededRng::new(seed);
    let mut folds = vec![Vec::new(); k];
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < k {
            return Err(LearnError::InsufficientClassRows { needed: k, got: idx.len() });
        }
        rng.shuffle(&mut idx);
        for (pos, i) in idx.into_iter().enumerate() {
            folds[pos % k].push(i);
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedPipeline {
    pub pca: Option<PcaModel>,
    pub forest: ForestModel,
}

impl TrainedPipeline {
    pub fn predict(&self, row: &[f64]) -> Result<(bool, f64), LearnError> {
        match &self.pca {
            Some(m) => {
                let scores = pca_transform(m, std::slice::from_ref(&row.to_vec()))?;
                forest_predict(&self.forest, &scores[0])
            }
            None => forest_predict(&self.forest, row),
        }
    }
}

/// Fits PCA (when enabled) and the forest on `train` alone.
pub fn fit_pipeline(train: &Dataset, params: &EvalParams, seed: u64) -> Result<TrainedPipeline, LearnError> {
    if !params.pca_enabled {
        return Ok(TrainedPipeline { pca: None, forest: train_forest(train, &params.forest, seed)? });
    }
    let pca = pca_fit(&train.rows, params.variance_target)?;
    let scores = pca_transform(&pca, &train.rows)?;
    let names = (1..=pca.retained).map(|i| format!("pc{i}")).collect();
    let reduced = Dataset::new(names, scores, train.labels.clone(), train.level)?;
    let forest = train_forest(&reduced, &params.forest, seed)?;
    Ok(TrainedPipeline { pca: Some(pca), forest })
}

fn scores_on(model: &TrainedPipeline, test: &Dataset) -> Result<(f64, f64, f64), LearnError> {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (row, &truth) in test.rows.iter().zip(&test.labels) {
        let (pred, _) = model.predict(row)?;
        match (pred, truth) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let ratio = |a: usize, b: usize| if a + b == 0 { 0.0 } else { a as f64 / (a + b) as f64 };
    let precision = ratio(tp, fp);
    let recall = ratio(tp, fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok((precision, recall, f1))
}

/// Holdout precision / recall / F1 on the defective class plus k-fold F1.
/// Split seeds and forest seeds are derived from `seed` on separate streams.
pub fn evaluate(data: &Dataset, params: &EvalParams, seed: u64) -> Result<EvalReport, LearnError> {
    let (neg, pos) = data.class_counts();
    if neg == 0 || pos == 0 {
        return Err(LearnError::SingleClass);
    }
    let mut diagnostics = Vec::new();
    let (train_idx, test_idx) = holdout_split(&data.labels, mix_seed(seed, 0))?;
    let train = data.subset(&train_idx);
    let test = data.subset(&test_idx);
    let model = fit_pipeline(&train, params, mix_seed(seed, 1))?;
    let (precision, recall, f1) = scores_on(&model, &test)?;

    let k = params.folds;
    let (cv_f1_mean, cv_f1_sd, cv_folds) = if k >= 2 && neg.min(pos) >= k {
        let folds = stratified_folds(&data.labels, k, mix_seed(seed, 2))?;
        let f1s = params.forest.execution.map(&folds, |fold| {
            let held: std::collections::BTreeSet<usize> = fold.iter().copied().collect();
            let tr: Vec<usize> = (0..data.len()).filter(|i| !held.contains(i)).collect();
            let fold_seed = mix_seed(seed, 3 + fold[0] as u64);
            fit_pipeline(&data.subset(&tr), params, fold_seed)
                .and_then(|m| scores_on(&m, &data.subset(fold)))
                .map(|s| s.2)
        });
        let f1s: Vec<f64> = f1s.into_iter().collect::<Result<_, _>>()?;
        let mean = f1s.iter().sum::<f64>() / k as f64;
        let var = f1s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
        (Some(mean), Some(var.sqrt()), k)
    } else {
        diagnostics.push(format!(
            "{} level: {k}-fold cross-validation skipped, smallest class has {} rows",
            data.level,
            neg.min(pos)
        ));
        (None, None, 0)
    };

    Ok(EvalReport {
        level: data.level,
        precision,
        recall,
        f1,
        cv_f1_mean,
        cv_f1_sd,
        cv_folds,
        n_train: train.len(),
        n_test: test.len(),
        positive_rate: data.positive_rate(),
        pca_components: model.pca.as_ref().map(|m| m.retained),
        diagnostics,
    })
}
