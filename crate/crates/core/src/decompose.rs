//! Additive decomposition of forest predictions into per-feature
//! contributions.
//!
//! Walking a row through a tree yields a sequence of prediction increments:
//! the bootstrap step from the training base rate to the root, then one step
//! per split. Grouping increments by the feature that split the parent node
//! and averaging over trees gives the contribution matrix; restricting to
//! trees where the row was out-of-bag gives the cross validated variant.
//! Both reconstruct the matching prediction exactly: base rate + row sum =
//! prediction.
//!
//! Column 0 of the matrix is the bootstrap term; feature `f` of the dataset
//! lands in column `f + 1`. Accumulation order is fixed (trees ascending,
//! path order within a tree) so results are reproducible bit for bit.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::{ForestModel, PredVariant, PredictionMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContributionVariant {
    Plain,
    Oob,
}

/// The ordered local increments one row encounters in one tree. Slot 0 is
/// the bootstrap increment; slot `f + 1` belongs to dataset feature `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementTrace {
    pub row: usize,
    pub tree: usize,
    pub steps: Vec<(usize, Vec<f64>)>,
}

impl IncrementTrace {
    /// Sum of all increments, in path order.
    pub fn total(&self, n_outputs: usize) -> Vec<f64> {
        let mut total = vec![0.0; n_outputs];
        for (_, step) in &self.steps {
            for (t, v) in total.iter_mut().zip(step) {
                *t += v;
            }
        }
        total
    }
}

/// `n_rows x (n_features + 1) x n_outputs` contribution array. Cells of
/// undefined rows (never out-of-bag) are zero and excluded via the flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionMatrix {
    pub variant: ContributionVariant,
    pub n_rows: usize,
    pub n_features: usize,
    pub n_outputs: usize,
    pub values: Vec<f64>,
    /// Trees averaged per row: `|J~_i|` for OOB, `n_tree` for plain.
    pub oob_counts: Vec<u32>,
    pub undefined: Vec<bool>,
    pub base_rate: Vec<f64>,
    pub feature_names: Vec<String>,
    pub class_labels: Option<Vec<String>>,
}

impl ContributionMatrix {
    pub fn get(&self, row: usize, slot: usize, class: usize) -> f64 {
        self.values[(row * (self.n_features + 1) + slot) * self.n_outputs + class]
    }

    /// `sum_l F_il` for one output dimension.
    pub fn row_total(&self, row: usize, class: usize) -> f64 {
        (0..=self.n_features)
            .map(|slot| self.get(row, slot, class))
            .sum()
    }

    pub fn is_defined(&self, row: usize) -> bool {
        !self.undefined[row]
    }

    pub fn n_undefined(&self) -> usize {
        self.undefined.iter().filter(|&&u| u).count()
    }

    /// Contribution column of one feature (slot `feature + 1`) for one
    /// output dimension, over all rows.
    pub fn feature_column(&self, feature: usize, class: usize) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.get(i, feature + 1, class))
            .collect()
    }

    /// Variance of a feature's contributions over defined rows, summed over
    /// output dimensions. Used to order plots.
    pub fn feature_variance(&self, feature: usize) -> f64 {
        let rows: Vec<usize> = (0..self.n_rows).filter(|&i| self.is_defined(i)).collect();
        if rows.len() < 2 {
            return 0.0;
        }
        let n = rows.len() as f64;
        (0..self.n_outputs)
            .map(|k| {
                let mean = rows
                    .iter()
                    .map(|&i| self.get(i, feature + 1, k))
                    .sum::<f64>()
                    / n;
                rows.iter()
                    .map(|&i| (self.get(i, feature + 1, k) - mean).powi(2))
                    .sum::<f64>()
                    / n
            })
            .sum()
    }
}

/// Increment trace of one row through one tree.
pub fn trace_row(
    model: &ForestModel,
    dataset: &Dataset,
    row: usize,
    tree: usize,
) -> Result<IncrementTrace> {
    let cols = model.resolve_query(dataset)?;
    let t = &model.trees[tree];
    let mut steps = Vec::new();
    let root = t.root();
    let bootstrap: Vec<f64> = root
        .pred
        .iter()
        .zip(&model.base_rate)
        .map(|(r, b)| r - b)
        .collect();
    steps.push((0usize, bootstrap));
    t.walk(&cols, row, |feature, parent, child| {
        let inc: Vec<f64> = child
            .pred
            .iter()
            .zip(&parent.pred)
            .map(|(c, p)| c - p)
            .collect();
        steps.push((feature + 1, inc));
    });
    Ok(IncrementTrace { row, tree, steps })
}

/// Plain feature contributions of any schema-matching rows: increments
/// summed by feature over all trees, divided by the tree count.
pub fn feature_contributions(model: &ForestModel, rows: &Dataset) -> Result<ContributionMatrix> {
    aggregate(model, rows, ContributionVariant::Plain)
}

/// Out-of-bag cross validated contributions of the training set: increments
/// summed over the trees where each row was out-of-bag, divided by that
/// row's OOB tree count. Rows that were in every bag are flagged undefined.
pub fn oob_feature_contributions(
    model: &ForestModel,
    training: &Dataset,
) -> Result<ContributionMatrix> {
    if training.n_rows != model.in_bag.n_rows {
        return Err(Error::SchemaMismatch(format!(
            "in-bag record covers {} rows, dataset has {}",
            model.in_bag.n_rows, training.n_rows
        )));
    }
    aggregate(model, training, ContributionVariant::Oob)
}

fn aggregate(
    model: &ForestModel,
    rows: &Dataset,
    variant: ContributionVariant,
) -> Result<ContributionMatrix> {
    let cols = model.resolve_query(rows)?;
    let d = model.n_features();
    let c = model.n_outputs();
    let stride = (d + 1) * c;
    let mut values = vec![0.0; rows.n_rows * stride];
    let mut oob_counts = vec![0u32; rows.n_rows];
    let mut undefined = vec![false; rows.n_rows];

    values
        .par_chunks_mut(stride)
        .zip(oob_counts.par_iter_mut())
        .zip(undefined.par_iter_mut())
        .enumerate()
        .for_each(|(row, ((out, used), undef))| {
            let mut trees_used = 0u32;
            for (j, tree) in model.trees.iter().enumerate() {
                if variant == ContributionVariant::Oob && !model.in_bag.is_oob(row, j) {
                    continue;
                }
                trees_used += 1;
                let root = tree.root();
                for (k, (r, b)) in root.pred.iter().zip(&model.base_rate).enumerate() {
                    out[k] += r - b;
                }
                tree.walk(&cols, row, |feature, parent, child| {
                    let base = (feature + 1) * c;
                    for k in 0..c {
                        out[base + k] += child.pred[k] - parent.pred[k];
                    }
                });
            }
            *used = trees_used;
            if trees_used == 0 {
                *undef = true;
            } else {
                out.iter_mut().for_each(|v| *v /= trees_used as f64);
            }
        });

    Ok(ContributionMatrix {
        variant,
        n_rows: rows.n_rows,
        n_features: d,
        n_outputs: c,
        values,
        oob_counts,
        undefined,
        base_rate: model.base_rate.clone(),
        feature_names: model.schema.iter().map(|s| s.name.clone()).collect(),
        class_labels: model.class_labels().map(<[String]>::to_vec),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub variant: ContributionVariant,
    pub max_residual: f64,
    pub rows_checked: usize,
    pub pass: bool,
}

/// Check the reconstruction identity `base rate + row sum = prediction` on
/// every defined row and output dimension; passes at `<= 1e-9`.
pub fn verify_decomposition(
    contributions: &ContributionMatrix,
    predictions: &PredictionMatrix,
) -> Result<VerifyReport> {
    let expected = match predictions.variant {
        PredVariant::Plain => ContributionVariant::Plain,
        PredVariant::Oob => ContributionVariant::Oob,
    };
    if contributions.variant != expected {
        return Err(Error::VariantMismatch {
            expected: format!("{expected:?}").to_lowercase(),
            got: format!("{:?}", contributions.variant).to_lowercase(),
        });
    }
    if contributions.n_rows != predictions.n_rows
        || contributions.n_outputs != predictions.n_outputs
    {
        return Err(Error::SchemaMismatch(
            "contribution and prediction shapes differ".into(),
        ));
    }
    let mut max_residual = 0.0f64;
    let mut rows_checked = 0usize;
    for i in 0..contributions.n_rows {
        if !contributions.is_defined(i) || !predictions.is_defined(i) {
            continue;
        }
        rows_checked += 1;
        for k in 0..contributions.n_outputs {
            let reconstructed = contributions.base_rate[k] + contributions.row_total(i, k);
            let residual = (reconstructed - predictions.row(i)[k]).abs();
            max_residual = max_residual.max(residual);
        }
    }
    Ok(VerifyReport {
        variant: contributions.variant,
        max_residual,
        rows_checked,
        pass: max_residual <= 1e-9,
    })
}

/// In-bag weighted prediction displacement across every realized split on
/// one feature. Each split contributes `n_child * (child - parent)` to its
/// side; the weighted-mean law makes the two sides cancel exactly, which is
/// the "group size weighted probability change" identity for binary
/// features.
#[derive(Debug, Clone, Serialize)]
pub struct SplitDisplacement {
    pub feature: usize,
    pub n_splits: usize,
    /// Total in-bag weight on each side.
    pub left_weight: f64,
    pub right_weight: f64,
    /// `sum over splits of n_child * (child_pred - parent_pred)`.
    pub left_sum: Vec<f64>,
    pub right_sum: Vec<f64>,
}

impl SplitDisplacement {
    /// Mean displacement vectors (per unit of in-bag weight).
    pub fn mean_left(&self) -> Vec<f64> {
        self.left_sum.iter().map(|s| s / self.left_weight).collect()
    }

    pub fn mean_right(&self) -> Vec<f64> {
        self.right_sum
            .iter()
            .map(|s| s / self.right_weight)
            .collect()
    }

    /// Componentwise `left_sum + right_sum`; zero up to float error.
    pub fn balance(&self) -> Vec<f64> {
        self.left_sum
            .iter()
            .zip(&self.right_sum)
            .map(|(l, r)| l + r)
            .collect()
    }
}

pub fn split_displacement(model: &ForestModel, feature: usize) -> SplitDisplacement {
    let c = model.n_outputs();
    let mut out = SplitDisplacement {
        feature,
        n_splits: 0,
        left_weight: 0.0,
        right_weight: 0.0,
        left_sum: vec![0.0; c],
        right_sum: vec![0.0; c],
    };
    for tree in &model.trees {
        for node in &tree.nodes {
            let (Some(rule), Some((l, r))) = (&node.split, node.children) else {
                continue;
            };
            if rule.feature() != feature {
                continue;
            }
            out.n_splits += 1;
            let left = &tree.nodes[l as usize];
            let right = &tree.nodes[r as usize];
            out.left_weight += left.n as f64;
            out.right_weight += right.n as f64;
            for k in 0..c {
                out.left_sum[k] += left.n as f64 * (left.pred[k] - node.pred[k]);
                out.right_sum[k] += right.n as f64 * (right.pred[k] - node.pred[k]);
            }
        }
    }
    out
}

/// Long-format CSV: `row_id, feature name or "bootstrap", class label or
/// "value", contribution`. Undefined rows are omitted.
pub fn contributions_to_csv(cm: &ContributionMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("row_id,feature,class,contribution\n");
    for i in 0..cm.n_rows {
        if !cm.is_defined(i) {
            continue;
        }
        for slot in 0..=cm.n_features {
            let feature = if slot == 0 {
                "bootstrap".to_string()
            } else {
                cm.feature_names[slot - 1].clone()
            };
            for k in 0..cm.n_outputs {
                let class = match &cm.class_labels {
                    Some(labels) => labels[k].clone(),
                    None => "value".to_string(),
                };
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    i,
                    feature,
                    class,
                    cm.get(i, slot, k)
                ));
            }
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn contributions_to_json(cm: &ContributionMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string(cm).map_err(|e| Error::ModelParse(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn contributions_from_json(path: impl AsRef<Path>) -> Result<ContributionMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::ModelParse(e.to_string()))
}

/// Re-sum a trace by feature slot (order-independent grouping); test hook
/// for the reordering identity.
pub fn group_trace_by_feature(
    trace: &IncrementTrace,
    n_slots: usize,
    n_outputs: usize,
) -> Vec<f64> {
    let mut grouped: HashMap<usize, Vec<f64>> = HashMap::new();
    for (slot, inc) in &trace.steps {
        let entry = grouped.entry(*slot).or_insert_with(|| vec![0.0; n_outputs]);
        for (e, v) in entry.iter_mut().zip(inc) {
            *e += v;
        }
    }
    let mut flat = vec![0.0; n_slots * n_outputs];
    for (slot, vals) in grouped {
        flat[slot * n_outputs..(slot + 1) * n_outputs].copy_from_slice(&vals);
    }
    flat
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureColumn, Target};
    use crate::forest::{train_forest, Task, TrainConfig};
    use crate::sim::{bin_target, simulate_toy, ToyConfig};

    fn toy_model(n: usize, n_tree: usize, seed: u64) -> (crate::data::Dataset, ForestModel) {
        let sim = simulate_toy(&ToyConfig {
            n,
            seed,
            ..Default::default()
        })
        .unwrap();
        let cfg = TrainConfig {
            n_tree,
            seed,
            ..TrainConfig::new(Task::Regression)
        };
        let model = train_forest(&sim.dataset, &cfg).unwrap();
        (sim.dataset, model)
    }

    #[test]
    fn single_node_tree_traces_only_the_bootstrap_step() {
        let ds = Dataset::new(
            vec![FeatureColumn::numeric("x", vec![1.0, 2.0, 3.0])],
            Target::Numeric(vec![1.0, 2.0, 6.0]),
        )
        .unwrap();
        let cfg = TrainConfig {
            n_tree: 1,
            min_node_size: Some(10),
            ..TrainConfig::new(Task::Regression)
        };
        let model = train_forest(&ds, &cfg).unwrap();
        let trace = trace_row(&model, &ds, 0, 0).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].0, 0);
        let expected = model.trees[0].root().pred[0] - model.base_rate[0];
        assert_eq!(trace.steps[0].1, vec![expected]);
    }

    #[test]
    fn literal_increment_values() {
        use crate::forest::{
            ColumnSchema, InBagMatrix, ResolvedConfig, SchemaKind, TargetSchema, Tree, TreeNode,
        };
        // regression: parent mean 5.0, child mean 3.0 -> increment -2.0
        let reg_tree = Tree {
            nodes: vec![
                TreeNode {
                    parent: None,
                    split: Some(crate::forest::SplitRule::Numeric {
                        feature: 0,
                        break_point: 0.5,
                    }),
                    children: Some((1, 2)),
                    n: 4,
                    pred: vec![5.0],
                },
                TreeNode {
                    parent: Some(0),
                    split: None,
                    children: None,
                    n: 2,
                    pred: vec![3.0],
                },
                TreeNode {
                    parent: Some(0),
                    split: None,
                    children: None,
                    n: 2,
                    pred: vec![7.0],
                },
            ],
        };
        let model = ForestModel {
            schema: vec![ColumnSchema {
                name: "x".into(),
                kind: SchemaKind::Numeric,
            }],
            target_schema: TargetSchema::Numeric,
            config: ResolvedConfig {
                task: crate::forest::Task::Regression,
                n_tree: 1,
                mtry: 1,
                sample_size: 4,
                replace: true,
                stratify: None,
                min_node_size: 1,
                seed: 0,
                max_categorical_levels: 16,
            },
            base_rate: vec![4.5],
            trees: vec![reg_tree],
            in_bag: InBagMatrix {
                n_rows: 1,
                n_trees: 1,
                counts: vec![0],
            },
        };
        let ds = Dataset::new(
            vec![FeatureColumn::numeric("x", vec![0.0])],
            Target::Numeric(vec![0.0]),
        )
        .unwrap();
        let trace = trace_row(&model, &ds, 0, 0).unwrap();
        assert_eq!(trace.steps[1], (1, vec![-2.0]));

        // 3-class: (0.5, 0.25, 0.25) -> (0.75, 0.25, 0.0) steps by
        // (+0.25, 0, -0.25), a zero-sum vector
        let parent = [0.5, 0.25, 0.25];
        let child = [0.75, 0.25, 0.0];
        let inc: Vec<f64> = child.iter().zip(&parent).map(|(c, p)| c - p).collect();
        assert_eq!(inc, vec![0.25, 0.0, -0.25]);
        assert_eq!(inc.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn classification_increments_sum_to_zero() {
        let sim = simulate_toy(&ToyConfig {
            n: 250,
            ..Default::default()
        })
        .unwrap();
        let ds = bin_target(&sim.dataset, 3).unwrap();
        let cfg = TrainConfig {
            n_tree: 10,
            seed: 3,
            ..TrainConfig::new(Task::Classification)
        };
        let model = train_forest(&ds, &cfg).unwrap();
        for row in [0, 17, 101] {
            for tree in 0..10 {
                let trace = trace_row(&model, &ds, row, tree).unwrap();
                assert_eq!(trace.tree, tree);
                for (_, inc) in &trace.steps {
                    let sum: f64 = inc.iter().sum();
                    assert!(sum.abs() <= 1e-12, "increment sums to {sum}");
                }
            }
        }
    }

    #[test]
    fn plain_reconstruction_is_exact() {
        let (ds, model) = toy_model(300, 40, 11);
        let cm = feature_contributions(&model, &ds).unwrap();
        let preds = model.predict(&ds).unwrap();
        let report = verify_decomposition(&cm, &preds).unwrap();
        assert!(report.pass, "max residual {}", report.max_residual);
        assert_eq!(report.rows_checked, 300);
    }

    #[test]
    fn oob_reconstruction_is_exact() {
        let (ds, model) = toy_model(300, 40, 12);
        let cm = oob_feature_contributions(&model, &ds).unwrap();
        let preds = model.predict_oob(&ds).unwrap();
        let report = verify_decomposition(&cm, &preds).unwrap();
        assert!(report.pass, "max residual {}", report.max_residual);
    }

    #[test]
    fn perturbed_cell_fails_verification() {
        let (ds, model) = toy_model(120, 10, 13);
        let mut cm = feature_contributions(&model, &ds).unwrap();
        let preds = model.predict(&ds).unwrap();
        cm.values[5] += 1e-3;
        let report = verify_decomposition(&cm, &preds).unwrap();
        assert!(!report.pass);
        assert!((report.max_residual - 1e-3).abs() < 1e-6);
    }

    #[test]
    fn variant_mismatch_is_an_error() {
        let (ds, model) = toy_model(80, 5, 14);
        let cm = feature_contributions(&model, &ds).unwrap();
        let oob_preds = model.predict_oob(&ds).unwrap();
        assert!(matches!(
            verify_decomposition(&cm, &oob_preds),
            Err(Error::VariantMismatch { .. })
        ));
    }

    #[test]
    fn oob_equals_plain_when_every_row_is_oob() {
        let (ds, mut model) = toy_model(150, 12, 15);
        model.in_bag.counts.iter_mut().for_each(|c| *c = 0);
        let plain = feature_contributions(&model, &ds).unwrap();
        let oob = oob_feature_contributions(&model, &ds).unwrap();
        assert_eq!(plain.values, oob.values);
    }

    #[test]
    fn single_tree_oob_rows_equal_their_trace() {
        let (ds, model) = {
            let sim = simulate_toy(&ToyConfig {
                n: 60,
                seed: 16,
                ..Default::default()
            })
            .unwrap();
            let cfg = TrainConfig {
                n_tree: 1,
                seed: 16,
                ..TrainConfig::new(Task::Regression)
            };
            let model = train_forest(&sim.dataset, &cfg).unwrap();
            (sim.dataset, model)
        };
        let cm = oob_feature_contributions(&model, &ds).unwrap();
        for i in 0..ds.n_rows {
            if model.in_bag.is_oob(i, 0) {
                assert!(cm.is_defined(i));
                let trace = trace_row(&model, &ds, i, 0).unwrap();
                let grouped = group_trace_by_feature(&trace, cm.n_features + 1, 1);
                for (slot, &expected) in grouped.iter().enumerate() {
                    assert_eq!(cm.get(i, slot, 0), expected);
                }
            } else {
                assert!(!cm.is_defined(i));
            }
        }
    }

    #[test]
    fn stratified_bootstrap_column_is_the_stratification_offset() {
        let sim = simulate_toy(&ToyConfig {
            n: 400,
            seed: 21,
            ..Default::default()
        })
        .unwrap();
        let ds = bin_target(&sim.dataset, 3).unwrap();
        let cfg = TrainConfig {
            n_tree: 30,
            seed: 21,
            stratify: Some(vec![50, 25, 25]),
            sample_size: Some(100),
            ..TrainConfig::new(Task::Classification)
        };
        let model = train_forest(&ds, &cfg).unwrap();
        let cm = oob_feature_contributions(&model, &ds).unwrap();
        let strat_rate = [0.5, 0.25, 0.25];
        for i in 0..ds.n_rows {
            if !cm.is_defined(i) {
                continue;
            }
            for (k, &rate) in strat_rate.iter().enumerate() {
                let expected = rate - model.base_rate[k];
                assert!(
                    (cm.get(i, 0, k) - expected).abs() <= 1e-12,
                    "row {i} class {k}: {} vs {expected}",
                    cm.get(i, 0, k)
                );
            }
        }
    }

    #[test]
    fn unused_feature_column_is_exactly_zero() {
        // Target depends only on x1; x5/x6-style distractor columns that are
        // never split on must carry exactly zero contribution.
        let n = 40;
        let x1: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let constant = vec![1.0; n];
        let y: Vec<f64> = x1.iter().map(|v| v * 2.0).collect();
        let ds = Dataset::new(
            vec![
                FeatureColumn::numeric("x1", x1),
                FeatureColumn::numeric("dead", constant),
            ],
            Target::Numeric(y),
        )
        .unwrap();
        let cfg = TrainConfig {
            n_tree: 12,
            seed: 8,
            mtry: Some(2),
            ..TrainConfig::new(Task::Regression)
        };
        let model = train_forest(&ds, &cfg).unwrap();
        let cm = feature_contributions(&model, &ds).unwrap();
        for i in 0..n {
            assert_eq!(cm.get(i, 2, 0), 0.0);
        }
    }

    #[test]
    fn bootstrap_term_shrinks_with_more_trees() {
        let sim = simulate_toy(&ToyConfig {
            n: 120,
            seed: 30,
            ..Default::default()
        })
        .unwrap();
        let mean_abs_f0 = |n_tree: usize| {
            let cfg = TrainConfig {
                n_tree,
                seed: 30,
                ..TrainConfig::new(Task::Regression)
            };
            let model = train_forest(&sim.dataset, &cfg).unwrap();
            let cm = feature_contributions(&model, &sim.dataset).unwrap();
            (0..sim.dataset.n_rows)
                .map(|i| cm.get(i, 0, 0).abs())
                .sum::<f64>()
                / sim.dataset.n_rows as f64
        };
        assert!(mean_abs_f0(1000) < mean_abs_f0(10));
    }

    #[test]
    fn displacement_balance_is_zero() {
        let sim = simulate_toy(&ToyConfig {
            n: 300,
            seed: 31,
            ..Default::default()
        })
        .unwrap();
        let ds = bin_target(&sim.dataset, 3).unwrap();
        let cfg = TrainConfig {
            n_tree: 20,
            seed: 31,
            ..TrainConfig::new(Task::Classification)
        };
        let model = train_forest(&ds, &cfg).unwrap();
        for feature in 0..ds.n_features() {
            let disp = split_displacement(&model, feature);
            if disp.n_splits == 0 {
                continue;
            }
            for b in disp.balance() {
                assert!(b.abs() <= 1e-9, "balance {b}");
            }
        }
    }
}
