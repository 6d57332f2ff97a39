//! Z-score standardization and PCA via cyclic Jacobi eigendecomposition.

use serde::{Deserialize, Serialize};

use super::LearnError;

#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub rows: Vec<Vec<f64>>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// Features with zero variance; their scale is 1 and values become 0.
    pub constant: Vec<usize>,
}

/// Centers each feature and divides by its population standard deviation.
pub fn standardize(rows: &[Vec<f64>]) -> Standardized {
    let p = rows.first().map_or(0, Vec::len);
    let n = rows.len() as f64;
    let mut means = vec![0.0; p];
    let mut scales = vec![1.0; p];
    let mut constant = Vec::new();
    for j in 0..p {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
        means[j] = mean;
        if var > 0.0 {
            scales[j] = var.sqrt();
        } else {
            constant.push(j);
        }
    }
    let out = rows
        .iter()
        .map(|r| r.iter().enumerate().map(|(j, v)| (v - means[j]) / scales[j]).collect())
        .collect();
    Standardized { rows: out, means, scales, constant }
}

const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix. Returns (eigenvalues,
/// eigenvectors as columns of the returned matrix, row-major).
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let scale = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOLERANCE * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// All principal axes as orthonormal rows, by decreasing variance.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained_ratio: Vec<f64>,
    /// Number of leading components kept by [`pca_transform`].
    pub retained: usize,
}

/// Fits PCA on the z-scored `rows`, keeping the smallest number of
/// components whose cumulative explained-variance ratio reaches
/// `variance_target`.
pub fn pca_fit(rows: &[Vec<f64>], variance_target: f64) -> Result<PcaModel, LearnError> {
    if rows.len() < 2 {
        return Err(LearnError::TooFewRows { needed: 2, got: rows.len() });
    }
    let p = rows[0].len();
    if p == 0 {
        return Err(LearnError::WidthMismatch { expected: 1, got: 0 });
    }
    let z = standardize(rows);
    let n = rows.len() as f64;
    let mut cov = vec![vec![0.0; p]; p];
    for r in &z.rows {
        for i in 0..p {
            for j in i..p {
                cov[i][j] += r[i] * r[j];
            }
        }
    }
    for i in 0..p {
        for j in i..p {
            cov[i][j] /= n;
            cov[j][i] = cov[i][j];
        }
    }
    let (values, vectors) = jacobi_eigen(cov);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k].max(0.0)).collect();
    let components: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| {
            let mut axis: Vec<f64> = vectors.iter().map(|row| row[k]).collect();
            // Sign convention: largest-magnitude loading positive.
            let lead = axis
                .iter()
                .copied()
                .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if lead < 0.0 {
                axis.iter_mut().for_each(|x| *x = -*x);
            }
            axis
        })
        .collect();
    let total: f64 = eigenvalues.iter().sum();
    let explained_ratio: Vec<f64> = if total > 0.0 {
        eigenvalues.iter().map(|e| e / total).collect()
    } else {
        vec![1.0 / p as f64; p]
    };
    let retained = if total > 0.0 {
        let mut cum = 0.0;
        let mut k = p;
        for (i, r) in explained_ratio.iter().enumerate() {
            cum += r;
            if cum >= variance_target - 1e-12 {
                k = i + 1;
                break;
            }
        }
        k
    } else {
        1
    };
    Ok(PcaModel {
        means: z.means,
        scales: z.scales,
        components,
        eigenvalues,
        explained_ratio,
        retained,
    })
}

/// Scores of `rows` on the retained components.
pub fn pca_transform(model: &PcaModel, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, LearnError> {
    let p = model.means.len();
    rows.iter()
        .map(|r| {
            if r.len() != p {
                return Err(LearnError::WidthMismatch { expected: p, got: r.len() });
            }
            let z: Vec<f64> = r.iter().enumerate().map(|(j, v)| (v - model.means[j]) / model.scales[j]).collect();
            Ok(model.components[..model.retained]
                .iter()
                .map(|c| c.iter().zip(&z).map(|(a, b)| a * b).sum())
                .collect())
        })
        .collect()
}

/// Maps retained-component scores back to the original feature space.
pub fn pca_inverse_transform(model: &PcaModel, scores: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = model.means.len();
    scores
        .iter()
        .map(|s| {
            (0..p)
                .map(|j| {
                    let z: f64 = s.iter().zip(&model.components).map(|(v, c)| v * c[j]).sum();
                    z * model.scales[j] + model.means[j]
                })
                .collect()
        })
        .collect()
}
