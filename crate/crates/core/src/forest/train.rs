//! Forest training.
//!
//! Trees grow depth-first (left child first) from an explicit work stack;
//! nodes land in preorder. Tree `j` draws everything from
//! `StreamRng::for_stream(seed, j)`, so parallel growth is bit-identical to
//! sequential growth.

use rayon::prelude::*;

use crate::data::{ColumnValues, Dataset, Target};
use crate::error::Result;
use crate::rng::StreamRng;

use super::split::{best_split, BagRow};
use super::tree::QueryCol;
use super::{
    bootstrap_sample, snapshot_schema, ForestModel, InBagMatrix, ResolvedConfig, Task, TrainConfig,
    Tree, TreeNode,
};

/// The mtry draw at one node, in draw order.
#[derive(Debug, Clone)]
pub struct NodeCandidates {
    pub node: u32,
    pub features: Vec<usize>,
}

/// Per-tree record of every candidate-feature draw, for split auditing.
#[derive(Debug, Clone)]
pub struct TrainTrace {
    pub per_tree: Vec<Vec<NodeCandidates>>,
}

pub fn train_forest(dataset: &Dataset, config: &TrainConfig) -> Result<ForestModel> {
    train_impl(dataset, config, false).map(|(model, _)| model)
}

/// Train while recording the mtry draw of every node, so tests can re-run
/// the split search over the exact candidate sets.
pub fn train_forest_traced(
    dataset: &Dataset,
    config: &TrainConfig,
) -> Result<(ForestModel, TrainTrace)> {
    train_impl(dataset, config, true)
}

fn train_impl(
    dataset: &Dataset,
    config: &TrainConfig,
    record: bool,
) -> Result<(ForestModel, TrainTrace)> {
    let resolved = config.resolve(dataset)?;
    let class_codes = dataset.class_codes();
    let n_rows = dataset.n_rows;

    let grown: Result<Vec<GrownTree>> = (0..resolved.n_tree)
        .into_par_iter()
        .map(|j| grow_tree(dataset, &resolved, class_codes, j as u64, record))
        .collect();
    let grown = grown?;

    let mut counts = vec![0u32; n_rows * resolved.n_tree];
    for (j, tree) in grown.iter().enumerate() {
        for (i, &c) in tree.bag.iter().enumerate() {
            counts[i * resolved.n_tree + j] = c;
        }
    }
    let (schema, target_schema) = snapshot_schema(dataset);
    let model = ForestModel {
        schema,
        target_schema,
        config: resolved.clone(),
        base_rate: base_rate(dataset),
        trees: grown.iter().map(|g| g.tree.clone()).collect(),
        in_bag: InBagMatrix {
            n_rows,
            n_trees: resolved.n_tree,
            counts,
        },
    };
    let trace = TrainTrace {
        per_tree: grown.into_iter().map(|g| g.candidates).collect(),
    };
    Ok((model, trace))
}

/// Training-set grand mean (regression) or class proportions.
fn base_rate(dataset: &Dataset) -> Vec<f64> {
    match &dataset.target {
        Target::Numeric(y) => vec![y.iter().sum::<f64>() / y.len() as f64],
        Target::Classes { labels, codes } => {
            let mut counts = vec![0u64; labels.len()];
            for &c in codes {
                counts[c as usize] += 1;
            }
            counts
                .into_iter()
                .map(|c| c as f64 / codes.len() as f64)
                .collect()
        }
    }
}

struct GrownTree {
    tree: Tree,
    bag: Vec<u32>,
    candidates: Vec<NodeCandidates>,
}

struct Pending {
    items: Vec<BagRow>,
    parent: Option<u32>,
    is_left: bool,
}

fn grow_tree(
    dataset: &Dataset,
    config: &ResolvedConfig,
    class_codes: Option<&[u32]>,
    tree_index: u64,
    record: bool,
) -> Result<GrownTree> {
    let mut rng = StreamRng::for_stream(config.seed, tree_index);
    let bag = bootstrap_sample(dataset.n_rows, config, class_codes, &mut rng)?;
    let cols = training_cols(dataset);
    let d = dataset.n_features();

    let root_items: Vec<BagRow> = bag
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(row, &count)| BagRow {
            row: row as u32,
            count,
        })
        .collect();

    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut left_of: Vec<u32> = Vec::new();
    let mut right_of: Vec<u32> = Vec::new();
    let mut candidates = Vec::new();

    let mut stack = vec![Pending {
        items: root_items,
        parent: None,
        is_left: false,
    }];
    while let Some(pending) = stack.pop() {
        let id = nodes.len() as u32;
        let n: u64 = pending.items.iter().map(|r| r.count as u64).sum();
        nodes.push(TreeNode {
            parent: pending.parent,
            split: None,
            children: None,
            n: n as u32,
            pred: node_prediction(dataset, config.task, &pending.items),
        });
        left_of.push(u32::MAX);
        right_of.push(u32::MAX);
        if let Some(parent) = pending.parent {
            if pending.is_left {
                left_of[parent as usize] = id;
            } else {
                right_of[parent as usize] = id;
            }
        }

        if n as usize <= config.min_node_size {
            continue;
        }
        let drawn = rng.draw_distinct(d, config.mtry);
        if record {
            candidates.push(NodeCandidates {
                node: id,
                features: drawn.clone(),
            });
        }
        let Some(rule) = best_split(dataset, config.task, &pending.items, &drawn) else {
            continue;
        };
        let feature = rule.feature();
        let (left_items, right_items): (Vec<BagRow>, Vec<BagRow>) = pending
            .items
            .iter()
            .partition(|r| cols[feature].goes_left(&rule, r.row as usize));
        debug_assert!(!left_items.is_empty() && !right_items.is_empty());
        nodes[id as usize].split = Some(rule);
        // Right is pushed first so the left child pops (and is numbered) first.
        stack.push(Pending {
            items: right_items,
            parent: Some(id),
            is_left: false,
        });
        stack.push(Pending {
            items: left_items,
            parent: Some(id),
            is_left: true,
        });
    }

    for (id, node) in nodes.iter_mut().enumerate() {
        if node.split.is_some() {
            node.children = Some((left_of[id], right_of[id]));
        }
    }
    Ok(GrownTree {
        tree: Tree { nodes },
        bag,
        candidates,
    })
}

pub(crate) fn training_cols(dataset: &Dataset) -> Vec<QueryCol<'_>> {
    dataset
        .columns
        .iter()
        .map(|c| match &c.values {
            ColumnValues::Numeric(v) => QueryCol::Numeric(v),
            ColumnValues::Categorical { codes, .. } => {
                QueryCol::Categorical(std::borrow::Cow::Borrowed(codes))
            }
        })
        .collect()
}

/// In-bag node prediction: `[weighted mean]` or class frequencies.
fn node_prediction(dataset: &Dataset, task: Task, items: &[BagRow]) -> Vec<f64> {
    match task {
        Task::Regression => {
            let y = dataset.numeric_target().expect("regression target");
            let mut n = 0.0;
            let mut s = 0.0;
            for r in items {
                n += r.count as f64;
                s += r.count as f64 * y[r.row as usize];
            }
            vec![s / n]
        }
        Task::Classification => {
            let codes = dataset.class_codes().expect("classification target");
            let mut counts = vec![0u64; dataset.n_classes()];
            let mut n = 0u64;
            for r in items {
                counts[codes[r.row as usize] as usize] += r.count as u64;
                n += r.count as u64;
            }
            counts.into_iter().map(|c| c as f64 / n as f64).collect()
        }
    }
}
