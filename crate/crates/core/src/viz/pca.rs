//! Small dense PCA for color gradients.
//!
//! Columns are z-scored, the covariance matrix is diagonalized with cyclic
//! Jacobi rotations, and each component's sign is fixed by making its
//! largest-magnitude loading positive (lowest index on ties), so scores are
//! deterministic.

use crate::data::Dataset;
use crate::error::{Error, Result};

use super::color::{hsl_to_rgb, ColorGradient, GradientMapping, GradientSource};

#[derive(Debug, Clone)]
pub struct Pca {
    /// Components by descending eigenvalue; each is a loading vector.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    pub features: Vec<usize>,
}

impl Pca {
    /// Score of one row on one component.
    pub fn score(&self, dataset: &Dataset, row: usize, component: usize) -> f64 {
        self.features
            .iter()
            .enumerate()
            .map(|(j, &f)| {
                let z = (dataset.columns[f].numeric_coded(row) - self.means[j]) / self.sds[j];
                z * self.components[component][j]
            })
            .sum()
    }

    /// Fraction of total variance carried by the leading `k` components.
    pub fn explained_fraction(&self, k: usize) -> f64 {
        let total: f64 = self.eigenvalues.iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        self.eigenvalues.iter().take(k).sum::<f64>() / total
    }
}

/// PCA of the z-scored feature columns (categoricals via integer coding).
pub fn fit_pca(dataset: &Dataset, features: &[usize]) -> Result<Pca> {
    let d = features.len();
    if d < 1 {
        return Err(Error::Config("pca needs at least one feature".into()));
    }
    let n = dataset.n_rows;
    let mut z = vec![0.0; n * d];
    let mut means = Vec::with_capacity(d);
    let mut sds = Vec::with_capacity(d);
    for (j, &f) in features.iter().enumerate() {
        let col = &dataset.columns[f];
        let raw: Vec<f64> = (0..n).map(|i| col.numeric_coded(i)).collect();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let sd = (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        if sd == 0.0 {
            return Err(Error::DegenerateEstimator(format!(
                "feature '{}' is constant; pca undefined",
                col.name
            )));
        }
        means.push(mean);
        sds.push(sd);
        for i in 0..n {
            z[i * d + j] = (raw[i] - mean) / sd;
        }
    }

    // covariance of z-scored columns (the correlation matrix)
    let mut cov = vec![0.0; d * d];
    for a in 0..d {
        for b in a..d {
            let mut s = 0.0;
            for i in 0..n {
                s += z[i * d + a] * z[i * d + b];
            }
            let v = s / n as f64;
            cov[a * d + b] = v;
            cov[b * d + a] = v;
        }
    }

    let (mut eigenvalues, mut vectors) = jacobi_eigen(&cov, d);

    // descending eigenvalues, deterministic order
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]).then(a.cmp(&b)));
    eigenvalues = order.iter().map(|&i| eigenvalues[i]).collect();
    vectors = order.iter().map(|&i| vectors[i].clone()).collect();

    // sign convention: largest-magnitude loading positive
    for vec in vectors.iter_mut() {
        let mut arg = 0;
        for (j, v) in vec.iter().enumerate() {
            if v.abs() > vec[arg].abs() {
                arg = j;
            }
        }
        if vec[arg] < 0.0 {
            vec.iter_mut().for_each(|v| *v = -*v);
        }
    }

    Ok(Pca {
        components: vectors,
        eigenvalues,
        means,
        sds,
        features: features.to_vec(),
    })
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, row eigenvectors).
fn jacobi_eigen(matrix: &[f64], d: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[p * d + q] * a[p * d + q];
            }
        }
        if off <= 1e-24 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..d {
                    let aip = a[i * d + p];
                    let aiq = a[i * d + q];
                    a[i * d + p] = c * aip - s * aiq;
                    a[i * d + q] = s * aip + c * aiq;
                }
                for i in 0..d {
                    let api = a[p * d + i];
                    let aqi = a[q * d + i];
                    a[p * d + i] = c * api - s * aqi;
                    a[q * d + i] = s * api + c * aqi;
                }
                for i in 0..d {
                    let vip = v[i * d + p];
                    let viq = v[i * d + q];
                    v[i * d + p] = c * vip - s * viq;
                    v[i * d + q] = s * vip + c * viq;
                }
            }
        }
    }
    let eigenvalues: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
    let vectors: Vec<Vec<f64>> = (0..d)
        .map(|col| (0..d).map(|row| v[row * d + col]).collect())
        .collect();
    (eigenvalues, vectors)
}

/// Color gradient along the top two principal directions of the full
/// feature space: first component drives hue, second drives lightness.
/// Falls back to one component (with a note) when the second carries no
/// variance.
pub fn pca_gradient(dataset: &Dataset) -> Result<ColorGradient> {
    let features: Vec<usize> = (0..dataset.n_features()).collect();
    if features.len() < 2 {
        return Err(Error::Config(
            "pca gradient needs at least two features".into(),
        ));
    }
    let pca = fit_pca(dataset, &features)?;
    let total: f64 = pca.eigenvalues.iter().sum();
    let two_components = pca.eigenvalues.len() > 1 && pca.eigenvalues[1] > 1e-10 * total;

    let s1: Vec<f64> = (0..dataset.n_rows)
        .map(|i| pca.score(dataset, i, 0))
        .collect();
    let normalize = |v: &[f64]| -> Vec<f64> {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        v.iter().map(|x| (x - lo) / span).collect()
    };
    let t1 = normalize(&s1);
    let colors: Vec<_> = if two_components {
        let s2: Vec<f64> = (0..dataset.n_rows)
            .map(|i| pca.score(dataset, i, 1))
            .collect();
        let t2 = normalize(&s2);
        t1.iter()
            .zip(&t2)
            .map(|(&a, &b)| hsl_to_rgb(270.0 * a, 0.85, 0.30 + 0.45 * b))
            .collect()
    } else {
        t1.iter()
            .map(|&a| hsl_to_rgb(270.0 * a, 0.85, 0.5))
            .collect()
    };
    Ok(ColorGradient {
        source: GradientSource::Pca2,
        mapping: GradientMapping::Linear,
        colors,
        positions: Some(t1),
        note: (!two_components).then(|| "pca gradient fell back to one component".to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureColumn, Target};

    fn two_col_dataset(a: Vec<f64>, b: Vec<f64>) -> Dataset {
        let n = a.len();
        Dataset::new(
            vec![
                FeatureColumn::numeric("a", a),
                FeatureColumn::numeric("b", b),
            ],
            Target::Numeric(vec![0.0; n]),
        )
        .unwrap()
    }

    #[test]
    fn perfectly_correlated_features_have_one_component() {
        let a: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let b: Vec<f64> = a.iter().map(|v| 3.0 * v + 1.0).collect();
        let ds = two_col_dataset(a, b);
        let pca = fit_pca(&ds, &[0, 1]).unwrap();
        assert!(pca.explained_fraction(1) >= 0.99);
    }

    #[test]
    fn orthonormal_inputs_give_axis_aligned_components() {
        // uncorrelated pattern with unequal variances after z-scoring is
        // still the identity correlation matrix; components are axes
        let a = vec![1.0, 1.0, -1.0, -1.0];
        let b = vec![1.0, -1.0, 1.0, -1.0];
        let ds = two_col_dataset(a, b);
        let pca = fit_pca(&ds, &[0, 1]).unwrap();
        for comp in &pca.components {
            let big = comp.iter().filter(|v| v.abs() > 0.9).count();
            let small = comp.iter().filter(|v| v.abs() < 1e-9).count();
            assert_eq!(big, 1, "{comp:?}");
            assert_eq!(small, 1, "{comp:?}");
        }
    }

    #[test]
    fn eigen_recovers_known_spectrum() {
        // covariance [[2,1],[1,2]] has eigenvalues 3 and 1
        let (vals, _) = jacobi_eigen(&[2.0, 1.0, 1.0, 2.0], 2);
        let mut sorted = vals;
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - 1.0).abs() < 1e-12);
        assert!((sorted[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_on_identical_columns_notes_fallback() {
        let a: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ds = two_col_dataset(a.clone(), a);
        let grad = pca_gradient(&ds).unwrap();
        assert!(grad.note.is_some());
        assert_eq!(grad.colors.len(), 20);
    }
}
