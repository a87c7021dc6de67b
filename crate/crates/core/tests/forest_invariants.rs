//! Structural invariants of trained forests, including a brute-force
//! re-evaluation of every realized split against the recorded candidate
//! draws.

use rfexplain::data::{ColumnValues, Dataset};
use rfexplain::decompose::{feature_contributions, oob_feature_contributions};
use rfexplain::forest::{
    train_forest, train_forest_traced, ForestModel, SplitRule, Task, TrainConfig, Tree,
};
use rfexplain::sim::{bin_target, simulate_toy, ToyConfig};

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn midpoint(lo: f64, hi: f64) -> f64 {
    let bp = lo + (hi - lo) / 2.0;
    if !(bp < hi) {
        lo
    } else {
        bp
    }
}

fn goes_left(ds: &Dataset, rule: &SplitRule, row: usize) -> bool {
    match rule {
        SplitRule::Numeric {
            feature,
            break_point,
        } => match &ds.columns[*feature].values {
            ColumnValues::Numeric(v) => v[row] <= *break_point,
            _ => panic!("numeric rule on categorical column"),
        },
        SplitRule::Categorical { feature, left_mask } => match &ds.columns[*feature].values {
            ColumnValues::Categorical { codes, .. } => left_mask & (1 << codes[row]) != 0,
            _ => panic!("categorical rule on numeric column"),
        },
    }
}

/// In-bag (row, count) items at every node, routed from the root.
fn items_per_node(model: &ForestModel, ds: &Dataset, tree_idx: usize) -> Vec<Vec<(u32, u32)>> {
    let tree = &model.trees[tree_idx];
    let mut per_node: Vec<Vec<(u32, u32)>> = vec![Vec::new(); tree.nodes.len()];
    per_node[0] = (0..ds.n_rows)
        .filter_map(|i| {
            let c = model.in_bag.get(i, tree_idx);
            (c > 0).then_some((i as u32, c))
        })
        .collect();
    for id in 0..tree.nodes.len() {
        if let (Some(rule), Some((l, r))) = (&tree.nodes[id].split, tree.nodes[id].children) {
            let items = per_node[id].clone();
            let (left, right): (Vec<_>, Vec<_>) = items
                .into_iter()
                .partition(|&(row, _)| goes_left(ds, rule, row as usize));
            per_node[l as usize] = left;
            per_node[r as usize] = right;
        }
    }
    per_node
}

/// Exact rational for comparisons: a/b vs c/d by cross multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Ratio {
    num: u128,
    den: u128,
}

impl Ratio {
    fn less_than(&self, other: &Ratio) -> bool {
        self.num * other.den < other.num * self.den
    }

    fn greater_than(&self, other: &Ratio) -> bool {
        self.num * other.den > other.num * self.den
    }
}

struct ClassStats {
    left: Vec<u64>,
    right: Vec<u64>,
}

impl ClassStats {
    fn n_left(&self) -> u64 {
        self.left.iter().sum()
    }
    fn n_right(&self) -> u64 {
        self.right.iter().sum()
    }

    /// Size-weighted Gini as an exact rational:
    /// `n - (sum c_L^2 / n_L + sum c_R^2 / n_R)`.
    fn weighted_gini(&self) -> Ratio {
        let (nl, nr) = (self.n_left(), self.n_right());
        let al: u64 = self.left.iter().map(|&c| c * c).sum();
        let ar: u64 = self.right.iter().map(|&c| c * c).sum();
        let n = nl + nr;
        let num = (n as u128) * (nl as u128) * (nr as u128)
            - (al as u128 * nr as u128 + ar as u128 * nl as u128);
        Ratio {
            num,
            den: nl as u128 * nr as u128,
        }
    }

    /// Size-weighted squared distance of the child class distributions from
    /// the simplex center, as an exact rational:
    /// `sum_child n_child * || p_child - (1/K,...) ||^2`.
    fn weighted_center_distance(&self, k: usize) -> Ratio {
        let (nl, nr) = (self.n_left(), self.n_right());
        let kk = k as u128;
        let mut num_l: u128 = 0;
        for &c in &self.left {
            let diff = (kk * c as u128).abs_diff(nl as u128);
            num_l += diff * diff;
        }
        let mut num_r: u128 = 0;
        for &c in &self.right {
            let diff = (kk * c as u128).abs_diff(nr as u128);
            num_r += diff * diff;
        }
        Ratio {
            num: num_l * nr as u128 + num_r * nl as u128,
            den: kk * kk * nl as u128 * nr as u128,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Candidate {
    Numeric { feature: usize, break_point: f64 },
    Mask { feature: usize, left_mask: u32 },
}

/// Every candidate split at a node (in the trainer's scan order) with its
/// class stats. Independent enumeration: sorted distinct values, canonical
/// subsets containing level 0.
fn enumerate_candidates(
    ds: &Dataset,
    items: &[(u32, u32)],
    features: &[usize],
    n_classes: usize,
) -> Vec<(Candidate, ClassStats)> {
    let codes = ds.class_codes().unwrap();
    let mut out = Vec::new();
    for &feature in features {
        match &ds.columns[feature].values {
            ColumnValues::Numeric(values) => {
                let mut sorted: Vec<(f64, u32, u32)> = items
                    .iter()
                    .map(|&(row, count)| (values[row as usize], row, count))
                    .collect();
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let mut left = vec![0u64; n_classes];
                let mut right = vec![0u64; n_classes];
                for &(_, row, count) in &sorted {
                    right[codes[row as usize] as usize] += count as u64;
                }
                for i in 0..sorted.len().saturating_sub(1) {
                    let (v, row, count) = sorted[i];
                    left[codes[row as usize] as usize] += count as u64;
                    right[codes[row as usize] as usize] -= count as u64;
                    let next = sorted[i + 1].0;
                    if v < next {
                        let break_point = midpoint(v, next);
                        out.push((
                            Candidate::Numeric {
                                feature,
                                break_point,
                            },
                            ClassStats {
                                left: left.clone(),
                                right: right.clone(),
                            },
                        ));
                    }
                }
            }
            ColumnValues::Categorical { levels, codes: col } => {
                let k_levels = levels.len();
                if k_levels < 2 {
                    continue;
                }
                let mut level_class = vec![0u64; k_levels * n_classes];
                for &(row, count) in items {
                    let lvl = col[row as usize] as usize;
                    level_class[lvl * n_classes + codes[row as usize] as usize] += count as u64;
                }
                for m in 0..((1u32 << (k_levels - 1)) - 1) {
                    let mask = (m << 1) | 1;
                    let mut left = vec![0u64; n_classes];
                    let mut right = vec![0u64; n_classes];
                    for lvl in 0..k_levels {
                        let dst = if mask & (1 << lvl) != 0 {
                            &mut left
                        } else {
                            &mut right
                        };
                        for class in 0..n_classes {
                            dst[class] += level_class[lvl * n_classes + class];
                        }
                    }
                    if left.iter().sum::<u64>() == 0 || right.iter().sum::<u64>() == 0 {
                        continue;
                    }
                    out.push((
                        Candidate::Mask {
                            feature,
                            left_mask: mask,
                        },
                        ClassStats { left, right },
                    ));
                }
            }
        }
    }
    out
}

fn rule_to_candidate(rule: &SplitRule) -> Candidate {
    match rule {
        SplitRule::Numeric {
            feature,
            break_point,
        } => Candidate::Numeric {
            feature: *feature,
            break_point: *break_point,
        },
        SplitRule::Categorical { feature, left_mask } => Candidate::Mask {
            feature: *feature,
            left_mask: *left_mask,
        },
    }
}

/// On every realized classification split: the chosen rule minimizes exact
/// size-weighted Gini over the drawn candidates, and the same rule maximizes
/// the size-weighted squared distance from the simplex center.
#[test]
fn gini_split_equals_max_center_distance_on_every_split() {
    let sim = simulate_toy(&ToyConfig {
        n: 250,
        seed: 77,
        ..Default::default()
    })
    .unwrap();
    let mut ds = bin_target(&sim.dataset, 3).unwrap();
    // add a categorical feature so mask splits are exercised
    let codes: Vec<u32> = (0..ds.n_rows).map(|i| (i % 4) as u32).collect();
    ds.columns.push(rfexplain::data::FeatureColumn::categorical(
        "cat",
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
        codes,
    ));
    let k = ds.n_classes();
    let config = TrainConfig {
        n_tree: 8,
        seed: 77,
        mtry: Some(3),
        ..TrainConfig::new(Task::Classification)
    };
    let (model, trace) = train_forest_traced(&ds, &config).unwrap();

    let mut splits_checked = 0usize;
    for (j, tree) in model.trees.iter().enumerate() {
        let per_node = items_per_node(&model, &ds, j);
        for draw in &trace.per_tree[j] {
            let node = &tree.nodes[draw.node as usize];
            let items = &per_node[draw.node as usize];
            let candidates = enumerate_candidates(&ds, items, &draw.features, k);
            match &node.split {
                Some(rule) => {
                    splits_checked += 1;
                    let mut best_gini: Option<(usize, Ratio)> = None;
                    let mut best_dist: Option<(usize, Ratio)> = None;
                    for (idx, (_, stats)) in candidates.iter().enumerate() {
                        let gini = stats.weighted_gini();
                        if best_gini.is_none_or(|(_, b)| gini.less_than(&b)) {
                            best_gini = Some((idx, gini));
                        }
                        let dist = stats.weighted_center_distance(k);
                        if best_dist.is_none_or(|(_, b)| dist.greater_than(&b)) {
                            best_dist = Some((idx, dist));
                        }
                    }
                    let (gini_idx, _) = best_gini.expect("a realized split has candidates");
                    let (dist_idx, _) = best_dist.unwrap();
                    assert_eq!(
                        gini_idx, dist_idx,
                        "gini argmin and center-distance argmax disagree"
                    );
                    assert_eq!(
                        candidates[gini_idx].0,
                        rule_to_candidate(rule),
                        "tree {j} node {}: trainer chose a different split",
                        draw.node
                    );
                }
                None => {
                    // the trainer declined: target constant or no candidate
                    let codes = ds.class_codes().unwrap();
                    let first = codes[items[0].0 as usize];
                    let constant = items.iter().all(|&(row, _)| codes[row as usize] == first);
                    assert!(
                        constant || candidates.is_empty(),
                        "trainer declined a splittable node"
                    );
                }
            }
        }
    }
    assert!(splits_checked > 100, "only {splits_checked} splits checked");
}

/// Regression splits re-checked with the documented SSE formula.
#[test]
fn regression_splits_minimize_sse_over_drawn_candidates() {
    let sim = simulate_toy(&ToyConfig {
        n: 150,
        seed: 78,
        ..Default::default()
    })
    .unwrap();
    let ds = sim.dataset;
    let config = TrainConfig {
        n_tree: 5,
        seed: 78,
        ..TrainConfig::new(Task::Regression)
    };
    let (model, trace) = train_forest_traced(&ds, &config).unwrap();
    let y = ds.numeric_target().unwrap();

    let sse = |items: &[(u32, u32)]| -> f64 {
        let mut n = 0.0;
        let mut s = 0.0;
        let mut ss = 0.0;
        for &(row, count) in items {
            let w = count as f64;
            n += w;
            s += w * y[row as usize];
            ss += w * y[row as usize] * y[row as usize];
        }
        (ss - s * s / n).max(0.0)
    };

    let mut checked = 0usize;
    for (j, tree) in model.trees.iter().enumerate() {
        let per_node = items_per_node(&model, &ds, j);
        for draw in &trace.per_tree[j] {
            let Some(rule) = &tree.nodes[draw.node as usize].split else {
                continue;
            };
            let items = &per_node[draw.node as usize];
            // chosen split loss
            let (chosen_l, chosen_r): (Vec<_>, Vec<_>) = items
                .iter()
                .partition(|&&(row, _)| goes_left(&ds, rule, row as usize));
            let chosen_loss = sse(&chosen_l) + sse(&chosen_r);
            // every candidate on the drawn features
            for &feature in &draw.features {
                let ColumnValues::Numeric(values) = &ds.columns[feature].values else {
                    continue;
                };
                let mut distinct: Vec<f64> =
                    items.iter().map(|&(row, _)| values[row as usize]).collect();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                for w in distinct.windows(2) {
                    let bp = midpoint(w[0], w[1]);
                    let (l, r): (Vec<_>, Vec<_>) = items
                        .iter()
                        .partition(|&&(row, _)| values[row as usize] <= bp);
                    let loss = sse(&l) + sse(&r);
                    assert!(
                        loss >= chosen_loss - 1e-9,
                        "tree {j} node {}: candidate {bp} on f{feature} beats the chosen split",
                        draw.node
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 500, "only {checked} candidates checked");
}

#[test]
fn oob_fraction_matches_bootstrap_theory() {
    let sim = simulate_toy(&ToyConfig {
        n: 600,
        seed: 79,
        ..Default::default()
    })
    .unwrap();
    let model = train_forest(
        &sim.dataset,
        &TrainConfig {
            n_tree: 500,
            seed: 79,
            ..TrainConfig::new(Task::Regression)
        },
    )
    .unwrap();
    let n = sim.dataset.n_rows;
    let mean_fraction: f64 = (0..n)
        .map(|i| model.in_bag.oob_count(i) as f64 / 500.0)
        .sum::<f64>()
        / n as f64;
    assert!(
        (mean_fraction - 0.368).abs() <= 0.02,
        "oob fraction {mean_fraction}"
    );
    // at 500 trees no row is in every bag
    let oob = model.predict_oob(&sim.dataset).unwrap();
    assert_eq!(oob.n_undefined(), 0);
}

#[test]
fn training_and_derived_artifacts_are_deterministic() {
    let sim = simulate_toy(&ToyConfig {
        n: 250,
        seed: 80,
        ..Default::default()
    })
    .unwrap();
    let config = TrainConfig {
        n_tree: 30,
        seed: 80,
        ..TrainConfig::new(Task::Regression)
    };
    let a = train_forest(&sim.dataset, &config).unwrap();
    let b = train_forest(&sim.dataset, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        a.predict(&sim.dataset).unwrap().values,
        b.predict(&sim.dataset).unwrap().values
    );
    assert_eq!(
        feature_contributions(&a, &sim.dataset).unwrap().values,
        feature_contributions(&b, &sim.dataset).unwrap().values
    );
    assert_eq!(
        oob_feature_contributions(&a, &sim.dataset).unwrap().values,
        oob_feature_contributions(&b, &sim.dataset).unwrap().values
    );
}

#[test]
fn classification_weighted_mean_law() {
    let sim = simulate_toy(&ToyConfig {
        n: 300,
        seed: 81,
        ..Default::default()
    })
    .unwrap();
    let ds = bin_target(&sim.dataset, 3).unwrap();
    let model = train_forest(
        &ds,
        &TrainConfig {
            n_tree: 10,
            seed: 81,
            ..TrainConfig::new(Task::Classification)
        },
    )
    .unwrap();
    check_weighted_mean_law(&model.trees);
}

fn check_weighted_mean_law(trees: &[Tree]) {
    for tree in trees {
        for node in &tree.nodes {
            if let Some((l, r)) = node.children {
                let left = &tree.nodes[l as usize];
                let right = &tree.nodes[r as usize];
                for k in 0..node.pred.len() {
                    let lhs = left.n as f64 * left.pred[k] + right.n as f64 * right.pred[k];
                    let rhs = node.n as f64 * node.pred[k];
                    assert!((lhs - rhs).abs() <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn stratified_sampling_keeps_exact_counts_per_tree() {
    let sim = simulate_toy(&ToyConfig {
        n: 400,
        seed: 82,
        ..Default::default()
    })
    .unwrap();
    let ds = bin_target(&sim.dataset, 3).unwrap();
    let model = train_forest(
        &ds,
        &TrainConfig {
            n_tree: 12,
            seed: 82,
            stratify: Some(vec![30, 30, 40]),
            sample_size: Some(100),
            ..TrainConfig::new(Task::Classification)
        },
    )
    .unwrap();
    let codes = ds.class_codes().unwrap();
    for j in 0..12 {
        assert_eq!(model.in_bag.tree_total(j), 100);
        let mut per_class = [0u64; 3];
        for i in 0..ds.n_rows {
            per_class[codes[i] as usize] += model.in_bag.get(i, j) as u64;
        }
        assert_eq!(per_class, [30, 30, 40]);
        assert_eq!(model.trees[j].root().pred, vec![0.3, 0.3, 0.4]);
    }
}
