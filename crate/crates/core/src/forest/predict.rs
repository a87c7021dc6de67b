//! Ensemble prediction, plain and out-of-bag.

use std::borrow::Cow;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::data::{ColumnValues, Dataset};
use crate::error::{Error, Result};

use super::tree::QueryCol;
use super::{ColumnSchema, ForestModel, SchemaKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredVariant {
    Plain,
    Oob,
}

/// Row-major `n_rows x n_outputs` predictions. Rows that cannot be predicted
/// (never out-of-bag) are flagged and filled with NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    pub variant: PredVariant,
    pub n_rows: usize,
    pub n_outputs: usize,
    pub values: Vec<f64>,
    pub undefined: Vec<bool>,
}

impl PredictionMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_outputs..(i + 1) * self.n_outputs]
    }

    pub fn is_defined(&self, i: usize) -> bool {
        !self.undefined[i]
    }

    pub fn n_undefined(&self) -> usize {
        self.undefined.iter().filter(|&&u| u).count()
    }

    /// Majority-vote label: argmax with the lowest class index on ties.
    pub fn class_index(&self, i: usize) -> usize {
        let row = self.row(i);
        let mut best = 0;
        for (k, &p) in row.iter().enumerate() {
            if p > row[best] {
                best = k;
            }
        }
        best
    }

    /// `1 - mse/var(y)` over defined rows (regression).
    pub fn explained_variance(&self, y: &[f64]) -> f64 {
        let defined: Vec<usize> = (0..self.n_rows).filter(|&i| self.is_defined(i)).collect();
        let n = defined.len() as f64;
        let mean = defined.iter().map(|&i| y[i]).sum::<f64>() / n;
        let var = defined.iter().map(|&i| (y[i] - mean).powi(2)).sum::<f64>() / n;
        let mse = defined
            .iter()
            .map(|&i| (y[i] - self.row(i)[0]).powi(2))
            .sum::<f64>()
            / n;
        1.0 - mse / var
    }

    pub fn mean_absolute_error(&self, y: &[f64]) -> f64 {
        let defined: Vec<usize> = (0..self.n_rows).filter(|&i| self.is_defined(i)).collect();
        defined
            .iter()
            .map(|&i| (y[i] - self.row(i)[0]).abs())
            .sum::<f64>()
            / defined.len() as f64
    }

    /// Misclassification rate of majority-vote labels over defined rows.
    pub fn class_error_rate(&self, codes: &[u32]) -> f64 {
        let defined: Vec<usize> = (0..self.n_rows).filter(|&i| self.is_defined(i)).collect();
        let wrong = defined
            .iter()
            .filter(|&&i| self.class_index(i) != codes[i] as usize)
            .count();
        wrong as f64 / defined.len() as f64
    }
}

impl ForestModel {
    /// Resolve a query dataset against the model schema, remapping
    /// categorical codes onto the training level order.
    pub(crate) fn resolve_query<'a>(&self, dataset: &'a Dataset) -> Result<Vec<QueryCol<'a>>> {
        if dataset.n_features() != self.schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "model has {} features, query has {}",
                self.schema.len(),
                dataset.n_features()
            )));
        }
        let mut cols = Vec::with_capacity(self.schema.len());
        for (schema, column) in self.schema.iter().zip(&dataset.columns) {
            if schema.name != column.name {
                return Err(Error::SchemaMismatch(format!(
                    "expected column '{}', found '{}'",
                    schema.name, column.name
                )));
            }
            cols.push(resolve_column(schema, column)?);
        }
        Ok(cols)
    }

    /// Mean of terminal-node predictions over all trees.
    pub fn predict(&self, dataset: &Dataset) -> Result<PredictionMatrix> {
        let cols = self.resolve_query(dataset)?;
        let c = self.n_outputs();
        let mut values = vec![0.0; dataset.n_rows * c];
        values.par_chunks_mut(c).enumerate().for_each(|(row, out)| {
            for tree in &self.trees {
                let terminal = tree.terminal(&cols, row);
                for (slot, &p) in out.iter_mut().zip(&tree.nodes[terminal as usize].pred) {
                    *slot += p;
                }
            }
            out.iter_mut().for_each(|v| *v /= self.trees.len() as f64);
        });
        Ok(PredictionMatrix {
            variant: PredVariant::Plain,
            n_rows: dataset.n_rows,
            n_outputs: c,
            values,
            undefined: vec![false; dataset.n_rows],
        })
    }

    /// Out-of-bag prediction over the model's own training rows: the mean of
    /// terminal predictions over trees where the row was not in the bag.
    /// Rows in every bag are flagged undefined, not errors.
    pub fn predict_oob(&self, training: &Dataset) -> Result<PredictionMatrix> {
        if training.n_rows != self.in_bag.n_rows {
            return Err(Error::SchemaMismatch(format!(
                "in-bag record covers {} rows, dataset has {}",
                self.in_bag.n_rows, training.n_rows
            )));
        }
        let cols = self.resolve_query(training)?;
        let c = self.n_outputs();
        let mut values = vec![0.0; training.n_rows * c];
        let mut undefined = vec![false; training.n_rows];
        values
            .par_chunks_mut(c)
            .zip(undefined.par_iter_mut())
            .enumerate()
            .for_each(|(row, (out, undef))| {
                let mut used = 0usize;
                for (j, tree) in self.trees.iter().enumerate() {
                    if !self.in_bag.is_oob(row, j) {
                        continue;
                    }
                    used += 1;
                    let terminal = tree.terminal(&cols, row);
                    for (slot, &p) in out.iter_mut().zip(&tree.nodes[terminal as usize].pred) {
                        *slot += p;
                    }
                }
                if used == 0 {
                    *undef = true;
                    out.iter_mut().for_each(|v| *v = f64::NAN);
                } else {
                    out.iter_mut().for_each(|v| *v /= used as f64);
                }
            });
        Ok(PredictionMatrix {
            variant: PredVariant::Oob,
            n_rows: training.n_rows,
            n_outputs: c,
            values,
            undefined,
        })
    }
}

fn resolve_column<'a>(
    schema: &ColumnSchema,
    column: &'a crate::data::FeatureColumn,
) -> Result<QueryCol<'a>> {
    match (&schema.kind, &column.values) {
        (SchemaKind::Numeric, ColumnValues::Numeric(v)) => Ok(QueryCol::Numeric(v)),
        (
            SchemaKind::Categorical { levels },
            ColumnValues::Categorical {
                levels: q_levels,
                codes,
            },
        ) => {
            if levels == q_levels {
                return Ok(QueryCol::Categorical(Cow::Borrowed(codes)));
            }
            let index: HashMap<&str, u32> = levels
                .iter()
                .enumerate()
                .map(|(i, l)| (l.as_str(), i as u32))
                .collect();
            let mut remap = Vec::with_capacity(q_levels.len());
            for (q_code, q_level) in q_levels.iter().enumerate() {
                match index.get(q_level.as_str()) {
                    Some(&m) => remap.push(m),
                    None => {
                        let row = codes
                            .iter()
                            .position(|&c| c as usize == q_code)
                            .unwrap_or(0);
                        return Err(Error::UnseenLevel {
                            row,
                            column: column.name.clone(),
                            level: q_level.clone(),
                        });
                    }
                }
            }
            Ok(QueryCol::Categorical(Cow::Owned(
                codes.iter().map(|&c| remap[c as usize]).collect(),
            )))
        }
        (SchemaKind::Numeric, _) => Err(Error::SchemaMismatch(format!(
            "column '{}' must be numeric",
            column.name
        ))),
        (SchemaKind::Categorical { .. }, _) => Err(Error::SchemaMismatch(format!(
            "column '{}' must be categorical",
            column.name
        ))),
    }
}
