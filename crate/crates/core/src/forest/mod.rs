//! Random forest training and prediction with full in-bag bookkeeping.
//!
//! The model keeps everything the prediction decomposition needs: every
//! node's in-bag prediction, the per-tree bag-count matrix over training
//! rows, and the training base rate. Node predictions are probabilistic
//! class-frequency vectors for classification (no majority-vote reduction
//! inside trees), so ensemble predictions reconstruct exactly from path
//! increments.

mod predict;
mod sampling;
mod split;
mod train;
pub(crate) mod tree;

pub use predict::{PredVariant, PredictionMatrix};
pub use sampling::bootstrap_sample;
pub use split::{best_split, categorical_partitions, gini_impurity, BagRow};
pub use train::{train_forest, train_forest_traced, NodeCandidates, TrainTrace};
pub use tree::{SplitRule, Tree, TreeNode};

use serde::{Deserialize, Serialize};

use crate::data::{ColumnValues, Dataset, Target};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Regression,
    Classification,
}

/// Training request. Optional fields fall back to per-task defaults when the
/// dataset dimensions are known.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub task: Task,
    pub n_tree: usize,
    /// Candidate features per split; defaults to `max(1, d/3)` for
    /// regression and `max(1, floor(sqrt(d)))` for classification.
    pub mtry: Option<usize>,
    /// Bootstrap draws per tree; defaults to the number of training rows.
    pub sample_size: Option<usize>,
    pub replace: bool,
    /// Exact per-class draw counts (classification only); sampling is with
    /// replacement within each class so the root prediction equals the
    /// stratification proportions exactly.
    pub stratify: Option<Vec<usize>>,
    /// Nodes with at most this many in-bag observations become terminal;
    /// defaults to 5 for regression and 1 for classification.
    pub min_node_size: Option<usize>,
    pub seed: u64,
    pub max_categorical_levels: usize,
}

impl TrainConfig {
    pub fn new(task: Task) -> Self {
        TrainConfig {
            task,
            n_tree: 500,
            mtry: None,
            sample_size: None,
            replace: true,
            stratify: None,
            min_node_size: None,
            seed: 0,
            max_categorical_levels: 16,
        }
    }

    pub fn resolve(&self, dataset: &Dataset) -> Result<ResolvedConfig> {
        let d = dataset.n_features();
        let n = dataset.n_rows;
        if self.n_tree == 0 {
            return Err(Error::Config("n_tree must be >= 1".into()));
        }
        match (&dataset.target, self.task) {
            (Target::Numeric(_), Task::Regression) => {}
            (Target::Classes { labels, .. }, Task::Classification) => {
                if labels.len() < 2 {
                    return Err(Error::Config(
                        "classification target has a single class".into(),
                    ));
                }
            }
            (Target::Numeric(_), Task::Classification) => {
                return Err(Error::Config(
                    "classification task requires a class-label target".into(),
                ))
            }
            (Target::Classes { .. }, Task::Regression) => {
                return Err(Error::Config(
                    "regression task requires a numeric target".into(),
                ))
            }
        }
        for col in &dataset.columns {
            if col.is_categorical() && col.n_levels() > self.max_categorical_levels {
                return Err(Error::Config(format!(
                    "categorical column '{}' has {} levels, above the cap of {}",
                    col.name,
                    col.n_levels(),
                    self.max_categorical_levels
                )));
            }
        }
        let mtry = match self.mtry {
            Some(m) => {
                if m < 1 || m > d {
                    return Err(Error::Config(format!("mtry must be in 1..={d}, got {m}")));
                }
                m
            }
            None => match self.task {
                Task::Regression => (d / 3).max(1),
                Task::Classification => ((d as f64).sqrt().floor() as usize).max(1),
            },
        };
        let sample_size = match (self.sample_size, &self.stratify) {
            (Some(s), _) => s,
            (None, Some(strata)) => strata.iter().sum(),
            (None, None) => n,
        };
        if sample_size < 1 {
            return Err(Error::Config("sample_size must be >= 1".into()));
        }
        if !self.replace && self.stratify.is_none() && sample_size > n {
            return Err(Error::Config(format!(
                "sample_size {sample_size} exceeds {n} rows without replacement"
            )));
        }
        if let Some(strata) = &self.stratify {
            if self.task == Task::Regression {
                return Err(Error::Config(
                    "stratified sampling is only defined for classification".into(),
                ));
            }
            let k = dataset.n_classes();
            if strata.len() != k {
                return Err(Error::Config(format!(
                    "stratify needs one count per class ({k}), got {}",
                    strata.len()
                )));
            }
            let total: usize = strata.iter().sum();
            if total != sample_size {
                return Err(Error::Config(format!(
                    "stratify counts sum to {total}, sample_size is {sample_size}"
                )));
            }
            let codes = dataset.class_codes().expect("classification target");
            for (class, &count) in strata.iter().enumerate() {
                let available = codes.iter().filter(|&&c| c as usize == class).count();
                if count > 0 && available == 0 {
                    return Err(Error::Config(format!(
                        "stratify requests {count} draws of class {class} but no rows have it"
                    )));
                }
            }
        }
        let min_node_size = self.min_node_size.unwrap_or(match self.task {
            Task::Regression => 5,
            Task::Classification => 1,
        });
        if min_node_size < 1 {
            return Err(Error::Config("min_node_size must be >= 1".into()));
        }
        Ok(ResolvedConfig {
            task: self.task,
            n_tree: self.n_tree,
            mtry,
            sample_size,
            replace: self.replace,
            stratify: self.stratify.clone(),
            min_node_size,
            seed: self.seed,
            max_categorical_levels: self.max_categorical_levels,
        })
    }
}

/// Fully resolved training configuration, as stored in the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub task: Task,
    pub n_tree: usize,
    pub mtry: usize,
    pub sample_size: usize,
    pub replace: bool,
    pub stratify: Option<Vec<usize>>,
    pub min_node_size: usize,
    pub seed: u64,
    pub max_categorical_levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemaKind {
    Numeric,
    Categorical { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: SchemaKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetSchema {
    Numeric,
    Classes { labels: Vec<String> },
}

/// Dense per-row, per-tree bag counts (row-major: row `i`, tree `j` at
/// `i * n_trees + j`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InBagMatrix {
    pub n_rows: usize,
    pub n_trees: usize,
    pub counts: Vec<u32>,
}

impl InBagMatrix {
    pub fn get(&self, row: usize, tree: usize) -> u32 {
        self.counts[row * self.n_trees + tree]
    }

    pub fn is_oob(&self, row: usize, tree: usize) -> bool {
        self.get(row, tree) == 0
    }

    /// Number of trees where `row` is out-of-bag.
    pub fn oob_count(&self, row: usize) -> usize {
        (0..self.n_trees).filter(|&j| self.is_oob(row, j)).count()
    }

    pub fn tree_total(&self, tree: usize) -> u64 {
        (0..self.n_rows).map(|i| self.get(i, tree) as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub schema: Vec<ColumnSchema>,
    pub target_schema: TargetSchema,
    pub config: ResolvedConfig,
    /// Training-set grand mean (regression) or class proportions.
    pub base_rate: Vec<f64>,
    pub trees: Vec<Tree>,
    pub in_bag: InBagMatrix,
}

impl ForestModel {
    /// Prediction dimensionality: 1 for regression, K for classification.
    pub fn n_outputs(&self) -> usize {
        self.base_rate.len()
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn n_training_rows(&self) -> usize {
        self.in_bag.n_rows
    }

    pub fn class_labels(&self) -> Option<&[String]> {
        match &self.target_schema {
            TargetSchema::Numeric => None,
            TargetSchema::Classes { labels } => Some(labels),
        }
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.schema.iter().map(|c| c.name.as_str()).collect()
    }
}

/// Schema snapshot of a training dataset.
pub(crate) fn snapshot_schema(dataset: &Dataset) -> (Vec<ColumnSchema>, TargetSchema) {
    let columns = dataset
        .columns
        .iter()
        .map(|c| ColumnSchema {
            name: c.name.clone(),
            kind: match &c.values {
                ColumnValues::Numeric(_) => SchemaKind::Numeric,
                ColumnValues::Categorical { levels, .. } => SchemaKind::Categorical {
                    levels: levels.clone(),
                },
            },
        })
        .collect();
    let target = match &dataset.target {
        Target::Numeric(_) => TargetSchema::Numeric,
        Target::Classes { labels, .. } => TargetSchema::Classes {
            labels: labels.clone(),
        },
    };
    (columns, target)
}
