//! Tree storage and traversal.

use serde::{Deserialize, Serialize};

use std::borrow::Cow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SplitRule {
    /// Rows with `value <= break_point` go left.
    Numeric { feature: usize, break_point: f64 },
    /// Rows whose level bit is set in `left_mask` go left.
    Categorical { feature: usize, left_mask: u32 },
}

impl SplitRule {
    pub fn feature(&self) -> usize {
        match self {
            SplitRule::Numeric { feature, .. } => *feature,
            SplitRule::Categorical { feature, .. } => *feature,
        }
    }
}

/// Resolved feature columns for traversal: query values remapped onto the
/// model schema.
#[derive(Debug)]
pub(crate) enum QueryCol<'a> {
    Numeric(&'a [f64]),
    Categorical(Cow<'a, [u32]>),
}

impl QueryCol<'_> {
    #[inline]
    pub(crate) fn goes_left(&self, rule: &SplitRule, row: usize) -> bool {
        match (rule, self) {
            (SplitRule::Numeric { break_point, .. }, QueryCol::Numeric(values)) => {
                values[row] <= *break_point
            }
            (SplitRule::Categorical { left_mask, .. }, QueryCol::Categorical(codes)) => {
                left_mask & (1 << codes[row]) != 0
            }
            _ => unreachable!("split rule kind matches resolved column kind"),
        }
    }
}

/// Nodes are stored in preorder; node 0 is the root. A leaf has neither a
/// split nor children.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub parent: Option<u32>,
    pub split: Option<SplitRule>,
    pub children: Option<(u32, u32)>,
    /// In-bag observation count (with bootstrap multiplicity).
    pub n: u32,
    /// In-bag prediction: `[mean]` for regression, class frequencies for
    /// classification.
    pub pred: Vec<f64>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// Terminal node id for one row of resolved columns.
    pub(crate) fn terminal(&self, cols: &[QueryCol<'_>], row: usize) -> u32 {
        let mut id = 0u32;
        loop {
            let node = &self.nodes[id as usize];
            match (&node.split, node.children) {
                (Some(rule), Some((left, right))) => {
                    id = if cols[rule.feature()].goes_left(rule, row) {
                        left
                    } else {
                        right
                    };
                }
                _ => return id,
            }
        }
    }

    /// Walk a row from the root, calling `visit(split_feature, parent, child)`
    /// for every edge taken.
    pub(crate) fn walk<F>(&self, cols: &[QueryCol<'_>], row: usize, mut visit: F)
    where
        F: FnMut(usize, &TreeNode, &TreeNode),
    {
        let mut id = 0u32;
        loop {
            let node = &self.nodes[id as usize];
            match (&node.split, node.children) {
                (Some(rule), Some((left, right))) => {
                    let next = if cols[rule.feature()].goes_left(rule, row) {
                        left
                    } else {
                        right
                    };
                    visit(rule.feature(), node, &self.nodes[next as usize]);
                    id = next;
                }
                _ => return,
            }
        }
    }
}
