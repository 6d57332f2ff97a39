//! Random forest of CART trees with Gini splits.

use serde::{Deserialize, Serialize};

use super::{Dataset, LearnError};
use crate::exec::Execution;
use crate::rng::{mix_seed, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestParams {
    #[serde(default = "default_trees")]
    pub n_trees: usize,
    #[serde(default = "default_min_leaf")]
    pub min_leaf: usize,
    /// Candidate features per split; `None` means ⌈√p⌉.
    #[serde(default)]
    pub max_features: Option<usize>,
    #[serde(default = "default_true")]
    pub bootstrap: bool,
    #[serde(default, skip_serializing)]
    pub execution: Execution,
}

fn default_trees() -> usize {
    100
}
fn default_min_leaf() -> usize {
    1
}
fn default_true() -> bool {
    true
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: default_trees(),
            min_leaf: default_min_leaf(),
            max_features: None,
            bootstrap: true,
            execution: Execution::default(),
        }
    }
}

impl ForestParams {
    pub fn features_per_split(&self, p: usize) -> usize {
        self.max_features
            .unwrap_or_else(|| (p as f64).sqrt().ceil() as usize)
            .clamp(1, p.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Weighted samples reaching the node.
        samples: f64,
        /// samples·gini − Σ child samples·child gini.
        impurity_decrease: f64,
    },
    Leaf {
        /// Sample counts of (clean, defective).
        counts: [f64; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    pub root_samples: f64,
}

impl Tree {
    /// Leaf class vote; equal counts vote clean.
    pub fn predict(&self, row: &[f64]) -> bool {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split { feature, threshold, left, right, .. } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
                Node::Leaf { counts } => return counts[1] > counts[0],
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub params: ForestParams,
    pub seed: u64,
    pub n_features: usize,
}

fn gini_weighted(c0: f64, c1: f64) -> f64 {
    // n·gini = n − (c0² + c1²)/n
    let n = c0 + c1;
    if n == 0.0 {
        0.0
    } else {
        n - (c0 * c0 + c1 * c1) / n
    }
}

struct Builder<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [bool],
    min_leaf: usize,
    per_split: usize,
    rng: SeededRng,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    child_impurity: f64,
}

impl Builder<'_> {
    fn counts(&self, idx: &[usize]) -> [f64; 2] {
        let pos = idx.iter().filter(|&&i| self.labels[i]).count() as f64;
        [idx.len() as f64 - pos, pos]
    }

    fn best_split_on(&self, idx: &mut [usize], feature: usize, total: [f64; 2]) -> Option<BestSplit> {
        idx.sort_by(|&a, &b| self.rows[a][feature].total_cmp(&self.rows[b][feature]));
        let n = idx.len();
        let mut left = [0.0f64; 2];
        let mut best: Option<BestSplit> = None;
        for i in 0..n - 1 {
            left[usize::from(self.labels[idx[i]])] += 1.0;
            let (lo, hi) = (self.rows[idx[i]][feature], self.rows[idx[i + 1]][feature]);
            if lo == hi || i + 1 < self.min_leaf || n - i - 1 < self.min_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let child = gini_weighted(left[0], left[1]) + gini_weighted(right[0], right[1]);
            if best.as_ref().is_none_or(|b| child < b.child_impurity) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid < hi { mid } else { lo };
                best = Some(BestSplit { feature, threshold, child_impurity: child });
            }
        }
        best
    }

    fn grow(&mut self, mut idx: Vec<usize>) -> usize {
        let counts = self.counts(&idx);
        let here = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });
        let n = idx.len();
        if counts[0] == 0.0 || counts[1] == 0.0 || n < 2 * self.min_leaf {
            return here;
        }
        let p = self.rows[0].len();
        let mut features: Vec<usize> = (0..p).collect();
        self.rng.shuffle(&mut features);
        let mut best: Option<BestSplit> = None;
        let mut visited = 0;
        for f in features {
            if visited >= self.per_split {
                break;
            }
            let first = self.rows[idx[0]][f];
            if idx.iter().all(|&i| self.rows[i][f] == first) {
                continue;
            }
            visited += 1;
            if let Some(s) = self.best_split_on(&mut idx, f, counts) {
                if best.as_ref().is_none_or(|b| s.child_impurity < b.child_impurity) {
                    best = Some(s);
                }
            }
        }
        let Some(split) = best else {
            return here;
        };
        let (l_idx, r_idx): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.rows[i][split.feature] <= split.threshold);
        let decrease = gini_weighted(counts[0], counts[1]) - split.child_impurity;
        let left = self.grow(l_idx);
        let right = self.grow(r_idx);
        self.nodes[here] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
            samples: n as f64,
            impurity_decrease: decrease.max(0.0),
        };
        here
    }
}

fn train_tree(data: &Dataset, params: &ForestParams, seed: u64) -> Tree {
    let mut rng = SeededRng::new(seed);
    let n = data.len();
    let idx: Vec<usize> = if params.bootstrap {
        (0..n).map(|_| rng.index(n)).collect()
    } else {
        (0..n).collect()
    };
    let mut b = Builder {
        rows: &data.rows,
        labels: &data.labels,
        min_leaf: params.min_leaf.max(1),
        per_split: params.features_per_split(data.features.len()),
        rng,
        nodes: Vec::new(),
    };
    b.grow(idx);
    Tree {
        nodes: b.nodes,
        root_samples: n as f64,
    }
}

/// Trains `params.n_trees` trees; tree `i` uses seed `mix_seed(seed, i)`.
pub fn train_forest(data: &Dataset, params: &ForestParams, seed: u64) -> Result<ForestModel, LearnError> {
    let (neg, pos) = data.class_counts();
    if neg == 0 || pos == 0 {
        return Err(LearnError::SingleClass);
    }
    let trees = params
        .execution
        .map_range(params.n_trees, |i| train_tree(data, params, mix_seed(seed, i as u64)));
    Ok(ForestModel {
        trees,
        params: *params,
        seed,
        n_features: data.features.len(),
    })
}

/// Majority vote and the fraction of trees voting defective. Ties vote clean.
pub fn forest_predict(model: &ForestModel, row: &[f64]) -> Result<(bool, f64), LearnError> {
    if row.len() != model.n_features {
        return Err(LearnError::WidthMismatch { expected: model.n_features, got: row.len() });
    }
    let votes = model.trees.iter().filter(|t| t.predict(row)).count();
    let prob = votes as f64 / model.trees.len() as f64;
    Ok((prob > 0.5, prob))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub metric: String,
    pub importance: f64,
}

/// Mean decrease in Gini impurity per feature: each split's weighted
/// decrease divided by the tree's root sample count, averaged over trees.
pub fn mdi_importance(model: &ForestModel, names: &[String]) -> Vec<ImportanceRow> {
    let mut totals = vec![0.0; model.n_features];
    for tree in &model.trees {
        for node in &tree.nodes {
            if let Node::Split { feature, impurity_decrease, .. } = node {
                totals[*feature] += impurity_decrease / tree.root_samples;
            }
        }
    }
    let k = model.trees.len().max(1) as f64;
    names
        .iter()
        .zip(totals)
        .map(|(n, t)| ImportanceRow { metric: n.clone(), importance: t / k })
        .collect()
}
