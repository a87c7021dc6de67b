//! Goodness-of-visualization scoring.
//!
//! A plot of feature contributions against some feature context is a good
//! summary of the model structure when the context alone can re-estimate the
//! contributions. The score is the squared Pearson correlation between a
//! contribution column and its leave-one-out k-nearest-neighbor Gaussian
//! kernel estimate from the context features. Scores near 1 mean the plot's
//! axes explain the contribution variance; low scores point at interactions
//! living outside the plotted context.
//!
//! The bandwidth is adaptive per query (distance to the k-th neighbor) and
//! `k` defaults to `clamp(round(sqrt(N)), 10, N-1)`. Context columns are
//! z-scored; categorical columns enter through their integer coding.

use rayon::prelude::*;
use serde::Serialize;

use crate::data::Dataset;
use crate::decompose::ContributionMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct KernelConfig {
    /// Neighbor count; `None` uses the square-root default.
    pub k: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct GovRequest {
    /// Feature whose contributions are being explained.
    pub feature: usize,
    /// Features spanning the plot (the estimator's inputs).
    pub context: Vec<usize>,
    /// Restrict a classification report to one class.
    pub class: Option<usize>,
    pub kernel: KernelConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct GovClassDetail {
    /// Class index, or `None` for regression.
    pub class: Option<usize>,
    /// Squared Pearson correlation; `None` when degenerate (flagged, not 0).
    pub score: Option<f64>,
    pub response_variance: f64,
    /// LOO estimates aligned with `rows_used`.
    pub estimates: Vec<f64>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GovReport {
    pub feature: usize,
    pub feature_name: String,
    pub response: String,
    pub context: Vec<usize>,
    pub k: usize,
    /// Defined contribution rows that fed the estimator.
    pub rows_used: Vec<usize>,
    pub per_class: Vec<GovClassDetail>,
    /// Regression: the single score. Classification: variance-weighted mean
    /// over classes with defined scores.
    pub score: Option<f64>,
    /// Set when the estimator was degenerate (e.g. constant context).
    pub degenerate: Option<String>,
}

pub fn resolve_k(n_rows: usize, config: &KernelConfig) -> Result<usize> {
    if n_rows < 2 {
        return Err(Error::Config(format!(
            "kernel estimator needs at least 2 rows, got {n_rows}"
        )));
    }
    match config.k {
        Some(k) => {
            if k < 1 || k > n_rows - 1 {
                Err(Error::Config(format!(
                    "k must be in 1..={}, got {k}",
                    n_rows - 1
                )))
            } else {
                Ok(k)
            }
        }
        None => Ok(((n_rows as f64).sqrt().round() as usize)
            .max(10)
            .min(n_rows - 1)),
    }
}

/// Row-major context matrix.
#[derive(Debug, Clone)]
pub struct ContextMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub values: Vec<f64>,
}

impl ContextMatrix {
    fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The k nearest rows to `query` (squared distances), excluding `skip`;
/// distance ties break on the lower row index.
fn k_nearest(
    context: &ContextMatrix,
    query: &[f64],
    skip: Option<usize>,
    k: usize,
) -> Vec<(f64, usize)> {
    let mut dists: Vec<(f64, usize)> = (0..context.n_rows)
        .filter(|&j| Some(j) != skip)
        .map(|j| (squared_distance(context.row(j), query), j))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dists.len() {
        dists.select_nth_unstable_by(k - 1, cmp);
        dists.truncate(k);
    }
    dists.sort_unstable_by(cmp);
    dists
}

fn weighted_estimate(
    neighbors: &[(f64, usize)],
    context: &ContextMatrix,
    responses: &[f64],
) -> f64 {
    // Bandwidth: distance to the k-th neighbor; when that is zero, the
    // smallest positive distance in the pool keeps the weights finite.
    let h2 = {
        let kth = neighbors.last().expect("k >= 1").0;
        if kth > 0.0 {
            kth
        } else {
            let mut smallest = f64::INFINITY;
            for j in 0..context.n_rows {
                let d = squared_distance(context.row(j), context.row(neighbors[0].1));
                if d > 0.0 && d < smallest {
                    smallest = d;
                }
            }
            if smallest.is_finite() {
                smallest
            } else {
                1.0
            }
        }
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for &(d2, j) in neighbors {
        let w = (-d2 / h2).exp();
        num += w * responses[j];
        den += w;
    }
    num / den
}

/// Leave-one-out estimate of `responses` from pre-standardized context
/// columns: for each row, a Gaussian-weighted mean of the k nearest other
/// rows with the bandwidth set to the k-th neighbor distance.
pub fn loo_knn_estimate(
    context: &ContextMatrix,
    responses: &[f64],
    config: &KernelConfig,
) -> Result<Vec<f64>> {
    let n = context.n_rows;
    if responses.len() != n {
        return Err(Error::Config("context and response lengths differ".into()));
    }
    let k = resolve_k(n, config)?;
    for col in 0..context.n_cols {
        let first = context.values[col];
        if (0..n).all(|i| context.values[i * context.n_cols + col] == first) {
            return Err(Error::DegenerateEstimator(format!(
                "context column {col} is constant"
            )));
        }
    }
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let neighbors = k_nearest(context, context.row(i), Some(i), k);
            weighted_estimate(&neighbors, context, responses)
        })
        .collect())
}

/// z-score the given feature columns over a row subset (categoricals via
/// their integer coding). Errors when a column is constant on those rows.
pub fn standardized_context(
    dataset: &Dataset,
    features: &[usize],
    rows: &[usize],
) -> Result<ContextMatrix> {
    let n = rows.len();
    let m = features.len();
    let mut values = vec![0.0; n * m];
    for (c, &feature) in features.iter().enumerate() {
        let col = &dataset.columns[feature];
        let raw: Vec<f64> = rows.iter().map(|&i| col.numeric_coded(i)).collect();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let sd = (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        if sd == 0.0 {
            return Err(Error::DegenerateEstimator(format!(
                "context feature '{}' is constant over the scored rows",
                col.name
            )));
        }
        for (r, v) in raw.iter().enumerate() {
            values[r * m + c] = (v - mean) / sd;
        }
    }
    Ok(ContextMatrix {
        n_rows: n,
        n_cols: m,
        values,
    })
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    let mut sab = 0.0;
    for (x, y) in a.iter().zip(b) {
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
        sab += (x - ma) * (y - mb);
    }
    sab / (saa.sqrt() * sbb.sqrt())
}

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n
}

/// Score how well the context features explain one feature's contributions.
pub fn gov_score(
    contributions: &ContributionMatrix,
    dataset: &Dataset,
    request: &GovRequest,
) -> Result<GovReport> {
    let l = request.feature;
    let responses = response_columns(contributions, l, None);
    gov_with_responses(
        contributions,
        dataset,
        request,
        responses,
        contributions.feature_names[l].clone(),
    )
}

/// Score an interaction context `{a, b}`; the response is either feature
/// `a`'s contributions or the summed pair.
pub fn gov_interaction(
    contributions: &ContributionMatrix,
    dataset: &Dataset,
    a: usize,
    b: usize,
    summed: bool,
    kernel: KernelConfig,
) -> Result<GovReport> {
    let request = GovRequest {
        feature: a,
        context: vec![a, b],
        class: None,
        kernel,
    };
    let responses = if summed {
        response_columns(contributions, a, Some(b))
    } else {
        response_columns(contributions, a, None)
    };
    let name = if summed {
        format!(
            "{}+{}",
            contributions.feature_names[a], contributions.feature_names[b]
        )
    } else {
        contributions.feature_names[a].clone()
    };
    gov_with_responses(contributions, dataset, &request, responses, name)
}

/// Main-effect scores for every feature (context = the feature itself).
/// Per-feature estimator degeneracy (constant feature) is reported as a
/// flagged score, not an error.
pub fn main_effect_gov_all(
    contributions: &ContributionMatrix,
    dataset: &Dataset,
    kernel: &KernelConfig,
) -> Result<Vec<GovReport>> {
    (0..contributions.n_features)
        .map(|l| {
            let request = GovRequest {
                feature: l,
                context: vec![l],
                class: None,
                kernel: kernel.clone(),
            };
            match gov_score(contributions, dataset, &request) {
                Ok(report) => Ok(report),
                Err(Error::DegenerateEstimator(msg)) => Ok(GovReport {
                    feature: l,
                    feature_name: contributions.feature_names[l].clone(),
                    response: contributions.feature_names[l].clone(),
                    context: vec![l],
                    k: 0,
                    rows_used: Vec::new(),
                    per_class: Vec::new(),
                    score: None,
                    degenerate: Some(msg),
                }),
                Err(other) => Err(other),
            }
        })
        .collect()
}

/// Full-row contribution columns per output dimension: `F_l` or
/// `F_a + F_b`.
fn response_columns(
    contributions: &ContributionMatrix,
    feature: usize,
    summed_with: Option<usize>,
) -> Vec<Vec<f64>> {
    (0..contributions.n_outputs)
        .map(|k| {
            (0..contributions.n_rows)
                .map(|i| {
                    let mut v = contributions.get(i, feature + 1, k);
                    if let Some(b) = summed_with {
                        v += contributions.get(i, b + 1, k);
                    }
                    v
                })
                .collect()
        })
        .collect()
}

fn gov_with_responses(
    contributions: &ContributionMatrix,
    dataset: &Dataset,
    request: &GovRequest,
    full_responses: Vec<Vec<f64>>,
    response_name: String,
) -> Result<GovReport> {
    if request.context.is_empty() {
        return Err(Error::Config("gov context must be non-empty".into()));
    }
    let rows_used: Vec<usize> = (0..contributions.n_rows)
        .filter(|&i| contributions.is_defined(i))
        .collect();
    let k = resolve_k(rows_used.len(), &request.kernel)?;
    let context = standardized_context(dataset, &request.context, &rows_used)?;

    let classes: Vec<Option<usize>> = if contributions.n_outputs == 1 {
        vec![None]
    } else {
        match request.class {
            Some(c) => vec![Some(c)],
            None => (0..contributions.n_outputs).map(Some).collect(),
        }
    };

    let mut per_class = Vec::new();
    for class in classes {
        let col = class.unwrap_or(0);
        let responses: Vec<f64> = rows_used.iter().map(|&i| full_responses[col][i]).collect();
        let response_variance = variance(&responses);
        let detail = if response_variance == 0.0 {
            GovClassDetail {
                class,
                score: None,
                response_variance,
                estimates: responses.clone(),
                residuals: vec![0.0; responses.len()],
            }
        } else {
            let estimates = loo_knn_estimate(&context, &responses, &KernelConfig { k: Some(k) })?;
            let score = if variance(&estimates) == 0.0 {
                None
            } else {
                Some(pearson(&estimates, &responses).powi(2).clamp(0.0, 1.0))
            };
            let residuals = responses
                .iter()
                .zip(&estimates)
                .map(|(r, e)| r - e)
                .collect();
            GovClassDetail {
                class,
                score,
                response_variance,
                estimates,
                residuals,
            }
        };
        per_class.push(detail);
    }

    let score = if contributions.n_outputs == 1 || request.class.is_some() {
        per_class[0].score
    } else {
        let mut wsum = 0.0;
        let mut total = 0.0;
        for detail in &per_class {
            if let Some(s) = detail.score {
                wsum += detail.response_variance * s;
                total += detail.response_variance;
            }
        }
        if total > 0.0 {
            Some(wsum / total)
        } else {
            None
        }
    };

    Ok(GovReport {
        feature: request.feature,
        feature_name: contributions.feature_names[request.feature].clone(),
        response: response_name,
        context: request.context.clone(),
        k,
        rows_used,
        per_class,
        score,
        degenerate: None,
    })
}

/// Kernel regressor fitted on raw context columns, for evaluating the GOV
/// estimator on plot grids (no leave-one-out).
#[derive(Debug, Clone)]
pub struct FittedKernel {
    means: Vec<f64>,
    sds: Vec<f64>,
    context: ContextMatrix,
    responses: Vec<f64>,
    k: usize,
}

impl FittedKernel {
    pub fn fit(
        dataset: &Dataset,
        features: &[usize],
        rows: &[usize],
        responses: Vec<f64>,
        config: &KernelConfig,
    ) -> Result<Self> {
        let k = resolve_k(rows.len(), config)?;
        let mut means = Vec::new();
        let mut sds = Vec::new();
        for &feature in features {
            let col = &dataset.columns[feature];
            let raw: Vec<f64> = rows.iter().map(|&i| col.numeric_coded(i)).collect();
            let mean = raw.iter().sum::<f64>() / raw.len() as f64;
            let sd =
                (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / raw.len() as f64).sqrt();
            if sd == 0.0 {
                return Err(Error::DegenerateEstimator(format!(
                    "context feature '{}' is constant",
                    col.name
                )));
            }
            means.push(mean);
            sds.push(sd);
        }
        let context = standardized_context(dataset, features, rows)?;
        Ok(FittedKernel {
            means,
            sds,
            context,
            responses,
            k,
        })
    }

    /// Estimate at a raw (unstandardized) context point.
    pub fn predict(&self, raw: &[f64]) -> f64 {
        let query: Vec<f64> = raw
            .iter()
            .zip(self.means.iter().zip(&self.sds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect();
        let neighbors = k_nearest(&self.context, &query, None, self.k);
        weighted_estimate(&neighbors, &self.context, &self.responses)
    }
}
