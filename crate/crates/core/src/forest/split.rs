//! Loss-minimizing split search.
//!
//! Regression minimizes the summed child SSE; classification minimizes
//! node-size weighted Gini impurity. For classification the candidate
//! ordering is decided in exact integer arithmetic: with integer class
//! counts, weighted Gini is `n - q` with `q = sum_child (sum_k count_k^2) /
//! n_child`, so candidates are ranked by the exact rational `q`. Ties keep
//! the earlier candidate: features in draw order, then ascending break
//! points (numeric) or ascending canonical masks (categorical).

use crate::data::{ColumnValues, Dataset};
use crate::error::{Error, Result};

use super::{SplitRule, Task};

/// One in-bag row with its bootstrap multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BagRow {
    pub row: u32,
    pub count: u32,
}

/// Gini impurity `1 - sum_k (n_k/n)^2` of a class-count vector.
pub fn gini_impurity(class_counts: &[u32]) -> Result<f64> {
    let total: u64 = class_counts.iter().map(|&c| c as u64).sum();
    if total == 0 {
        return Err(Error::DegenerateNode);
    }
    let t = total as f64;
    let sum_sq: f64 = class_counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            p * p
        })
        .sum();
    Ok(1.0 - sum_sq)
}

/// Canonical binary partitions of `n_levels` categories: every left mask
/// contains level 0 and neither side is empty, enumerated in ascending mask
/// order. Yields `2^(n_levels-1) - 1` masks.
pub fn categorical_partitions(n_levels: usize) -> impl Iterator<Item = u32> {
    let m_max = if (2..=31).contains(&n_levels) {
        1u32 << (n_levels - 1)
    } else {
        1 // empty range below
    };
    (0..m_max.saturating_sub(1)).map(|m| (m << 1) | 1)
}

enum TargetView<'a> {
    Reg(&'a [f64]),
    Clf { codes: &'a [u32], n_classes: usize },
}

impl TargetView<'_> {
    fn is_constant(&self, rows: &[BagRow]) -> bool {
        match self {
            TargetView::Reg(y) => {
                let first = y[rows[0].row as usize];
                rows.iter().all(|r| y[r.row as usize] == first)
            }
            TargetView::Clf { codes, .. } => {
                let first = codes[rows[0].row as usize];
                rows.iter().all(|r| codes[r.row as usize] == first)
            }
        }
    }
}

/// Split quality with a strict "better than" order. Regression: lower loss.
/// Classification: higher exact rational `q` (cross-multiplied in u128).
#[derive(Debug, Clone, Copy)]
enum Quality {
    Reg(f64),
    Clf { num: u128, den: u128 },
}

impl Quality {
    fn better_than(&self, other: &Quality) -> bool {
        match (self, other) {
            (Quality::Reg(a), Quality::Reg(b)) => a < b,
            (Quality::Clf { num: an, den: ad }, Quality::Clf { num: bn, den: bd }) => {
                an * bd > bn * ad
            }
            _ => unreachable!("qualities of one search share a task"),
        }
    }
}

fn reg_loss(n_l: f64, s_l: f64, ss_l: f64, n_r: f64, s_r: f64, ss_r: f64) -> f64 {
    let sse_l = (ss_l - s_l * s_l / n_l).max(0.0);
    let sse_r = (ss_r - s_r * s_r / n_r).max(0.0);
    sse_l + sse_r
}

/// Loss-minimizing split over the candidate features, or `None` when the
/// target is constant or no candidate yields two non-empty children.
/// Candidate features are scanned in the order given, which is the tie-break
/// order.
pub fn best_split(
    dataset: &Dataset,
    task: Task,
    rows: &[BagRow],
    candidate_features: &[usize],
) -> Option<SplitRule> {
    if rows.is_empty() {
        return None;
    }
    let target = match task {
        Task::Regression => TargetView::Reg(dataset.numeric_target().expect("regression target")),
        Task::Classification => TargetView::Clf {
            codes: dataset.class_codes().expect("classification target"),
            n_classes: dataset.n_classes(),
        },
    };
    if target.is_constant(rows) {
        return None;
    }

    let mut best: Option<(Quality, SplitRule)> = None;
    for &feature in candidate_features {
        let candidate = match &dataset.columns[feature].values {
            ColumnValues::Numeric(values) => scan_numeric(values, &target, rows, feature),
            ColumnValues::Categorical { levels, codes } => {
                scan_categorical(levels.len(), codes, &target, rows, feature)
            }
        };
        if let Some((quality, rule)) = candidate {
            let take = match &best {
                Some((best_quality, _)) => quality.better_than(best_quality),
                None => true,
            };
            if take {
                best = Some((quality, rule));
            }
        }
    }
    best.map(|(_, rule)| rule)
}

fn scan_numeric(
    values: &[f64],
    target: &TargetView<'_>,
    rows: &[BagRow],
    feature: usize,
) -> Option<(Quality, SplitRule)> {
    let mut sorted: Vec<BagRow> = rows.to_vec();
    sorted.sort_unstable_by(|a, b| {
        values[a.row as usize]
            .total_cmp(&values[b.row as usize])
            .then(a.row.cmp(&b.row))
    });

    let mut best: Option<(Quality, f64)> = None;
    match target {
        TargetView::Reg(y) => {
            let mut n_t = 0.0;
            let mut s_t = 0.0;
            let mut ss_t = 0.0;
            for r in &sorted {
                let w = r.count as f64;
                let v = y[r.row as usize];
                n_t += w;
                s_t += w * v;
                ss_t += w * v * v;
            }
            let mut n_l = 0.0;
            let mut s_l = 0.0;
            let mut ss_l = 0.0;
            for i in 0..sorted.len() - 1 {
                let r = sorted[i];
                let w = r.count as f64;
                let v = y[r.row as usize];
                n_l += w;
                s_l += w * v;
                ss_l += w * v * v;
                let here = values[r.row as usize];
                let next = values[sorted[i + 1].row as usize];
                if here < next {
                    let quality =
                        Quality::Reg(reg_loss(n_l, s_l, ss_l, n_t - n_l, s_t - s_l, ss_t - ss_l));
                    consider_numeric(&mut best, quality, here, next);
                }
            }
        }
        TargetView::Clf { codes, n_classes } => {
            let mut right = vec![0u64; *n_classes];
            for r in &sorted {
                right[codes[r.row as usize] as usize] += r.count as u64;
            }
            let mut left = vec![0u64; *n_classes];
            let mut n_l = 0u64;
            let mut n_r: u64 = sorted.iter().map(|r| r.count as u64).sum();
            let mut a_l = 0u64;
            let mut a_r: u64 = right.iter().map(|&c| c * c).sum();
            for i in 0..sorted.len() - 1 {
                let r = sorted[i];
                let w = r.count as u64;
                let k = codes[r.row as usize] as usize;
                a_l += w * (2 * left[k] + w);
                left[k] += w;
                n_l += w;
                right[k] -= w;
                a_r -= w * (2 * right[k] + w);
                n_r -= w;
                let here = values[r.row as usize];
                let next = values[sorted[i + 1].row as usize];
                if here < next {
                    let quality = clf_quality(a_l, n_l, a_r, n_r);
                    consider_numeric(&mut best, quality, here, next);
                }
            }
        }
    }
    best.map(|(quality, break_point)| {
        (
            quality,
            SplitRule::Numeric {
                feature,
                break_point,
            },
        )
    })
}

/// `q = a_l/n_l + a_r/n_r` as an exact rational.
fn clf_quality(a_l: u64, n_l: u64, a_r: u64, n_r: u64) -> Quality {
    Quality::Clf {
        num: a_l as u128 * n_r as u128 + a_r as u128 * n_l as u128,
        den: n_l as u128 * n_r as u128,
    }
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn consider_numeric(best: &mut Option<(Quality, f64)>, quality: Quality, lo: f64, hi: f64) {
    // Midpoint, nudged down when rounding would send both values left.
    let mut bp = lo + (hi - lo) / 2.0;
    if !(bp < hi) {
        bp = lo;
    }
    let take = match best {
        Some((best_quality, _)) => quality.better_than(best_quality),
        None => true,
    };
    if take {
        *best = Some((quality, bp));
    }
}

fn scan_categorical(
    n_levels: usize,
    codes: &[u32],
    target: &TargetView<'_>,
    rows: &[BagRow],
    feature: usize,
) -> Option<(Quality, SplitRule)> {
    if n_levels < 2 {
        return None;
    }
    let mut best: Option<(Quality, u32)> = None;
    match target {
        TargetView::Reg(y) => {
            let mut n = vec![0u64; n_levels];
            let mut s = vec![0.0f64; n_levels];
            let mut ss = vec![0.0f64; n_levels];
            for r in rows {
                let lvl = codes[r.row as usize] as usize;
                let w = r.count as f64;
                let v = y[r.row as usize];
                n[lvl] += r.count as u64;
                s[lvl] += w * v;
                ss[lvl] += w * v * v;
            }
            for mask in categorical_partitions(n_levels) {
                let mut n_l = 0u64;
                let mut s_l = 0.0;
                let mut ss_l = 0.0;
                let mut n_r = 0u64;
                let mut s_r = 0.0;
                let mut ss_r = 0.0;
                for lvl in 0..n_levels {
                    if mask & (1 << lvl) != 0 {
                        n_l += n[lvl];
                        s_l += s[lvl];
                        ss_l += ss[lvl];
                    } else {
                        n_r += n[lvl];
                        s_r += s[lvl];
                        ss_r += ss[lvl];
                    }
                }
                if n_l == 0 || n_r == 0 {
                    continue;
                }
                let quality = Quality::Reg(reg_loss(n_l as f64, s_l, ss_l, n_r as f64, s_r, ss_r));
                consider_mask(&mut best, quality, mask);
            }
        }
        TargetView::Clf {
            codes: class_codes,
            n_classes,
        } => {
            let k = *n_classes;
            let mut counts = vec![0u64; n_levels * k];
            for r in rows {
                let lvl = codes[r.row as usize] as usize;
                let class = class_codes[r.row as usize] as usize;
                counts[lvl * k + class] += r.count as u64;
            }
            let mut left = vec![0u64; k];
            for mask in categorical_partitions(n_levels) {
                left.iter_mut().for_each(|c| *c = 0);
                let mut right = vec![0u64; k];
                for lvl in 0..n_levels {
                    let side = if mask & (1 << lvl) != 0 {
                        &mut left
                    } else {
                        &mut right
                    };
                    for class in 0..k {
                        side[class] += counts[lvl * k + class];
                    }
                }
                let n_l: u64 = left.iter().sum();
                let n_r: u64 = right.iter().sum();
                if n_l == 0 || n_r == 0 {
                    continue;
                }
                let a_l: u64 = left.iter().map(|&c| c * c).sum();
                let a_r: u64 = right.iter().map(|&c| c * c).sum();
                consider_mask(&mut best, clf_quality(a_l, n_l, a_r, n_r), mask);
            }
        }
    }
    best.map(|(quality, left_mask)| (quality, SplitRule::Categorical { feature, left_mask }))
}

fn consider_mask(best: &mut Option<(Quality, u32)>, quality: Quality, mask: u32) {
    let take = match best {
        Some((best_quality, _)) => quality.better_than(best_quality),
        None => true,
    };
    if take {
        *best = Some((quality, mask));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureColumn, Target};

    fn bag(rows: &[u32]) -> Vec<BagRow> {
        rows.iter().map(|&row| BagRow { row, count: 1 }).collect()
    }

    #[test]
    fn gini_examples() {
        assert_eq!(gini_impurity(&[1, 0, 0]).unwrap(), 0.0);
        assert!((gini_impurity(&[1, 1, 1]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(gini_impurity(&[2, 1, 1]).unwrap(), 0.625);
        assert!(matches!(gini_impurity(&[0, 0]), Err(Error::DegenerateNode)));
    }

    #[test]
    fn partition_counts() {
        assert_eq!(categorical_partitions(2).count(), 1);
        assert_eq!(categorical_partitions(3).count(), 3);
        assert_eq!(categorical_partitions(8).count(), 127);
        assert_eq!(categorical_partitions(16).count(), 32767);
        // every mask keeps level 0 on the left and neither side empty
        for mask in categorical_partitions(4) {
            assert_eq!(mask & 1, 1);
            assert_ne!(mask, 0b1111);
        }
    }

    #[test]
    fn perfect_numeric_separation() {
        let ds = Dataset::new(
            vec![FeatureColumn::numeric("x", vec![1.0, 2.0, 3.0, 4.0])],
            Target::Numeric(vec![0.0, 0.0, 10.0, 10.0]),
        )
        .unwrap();
        let rule = best_split(&ds, Task::Regression, &bag(&[0, 1, 2, 3]), &[0]).unwrap();
        assert_eq!(
            rule,
            SplitRule::Numeric {
                feature: 0,
                break_point: 2.5
            }
        );
    }

    #[test]
    fn constant_target_gives_none() {
        let ds = Dataset::new(
            vec![FeatureColumn::numeric("x", vec![1.0, 2.0, 3.0])],
            Target::Numeric(vec![4.0, 4.0, 4.0]),
        )
        .unwrap();
        assert_eq!(
            best_split(&ds, Task::Regression, &bag(&[0, 1, 2]), &[0]),
            None
        );
    }

    #[test]
    fn constant_feature_gives_none() {
        let ds = Dataset::new(
            vec![FeatureColumn::numeric("x", vec![7.0, 7.0, 7.0])],
            Target::Numeric(vec![0.0, 1.0, 2.0]),
        )
        .unwrap();
        assert_eq!(
            best_split(&ds, Task::Regression, &bag(&[0, 1, 2]), &[0]),
            None
        );
    }

    #[test]
    fn tie_breaks_on_feature_draw_order() {
        // Identical columns: both give a perfect split, the first candidate wins.
        let ds = Dataset::new(
            vec![
                FeatureColumn::numeric("a", vec![0.0, 0.0, 1.0, 1.0]),
                FeatureColumn::numeric("b", vec![0.0, 0.0, 1.0, 1.0]),
            ],
            Target::Numeric(vec![0.0, 0.0, 1.0, 1.0]),
        )
        .unwrap();
        let rule = best_split(&ds, Task::Regression, &bag(&[0, 1, 2, 3]), &[1, 0]).unwrap();
        assert_eq!(rule.feature(), 1);
        let rule = best_split(&ds, Task::Regression, &bag(&[0, 1, 2, 3]), &[0, 1]).unwrap();
        assert_eq!(rule.feature(), 0);
    }

    #[test]
    fn tie_breaks_on_smaller_break_point() {
        // Symmetric target: both break points leave SSE 0.5, smaller wins.
        let ds = Dataset::new(
            vec![FeatureColumn::numeric("x", vec![1.0, 2.0, 3.0])],
            Target::Numeric(vec![0.0, 1.0, 0.0]),
        )
        .unwrap();
        let rule = best_split(&ds, Task::Regression, &bag(&[0, 1, 2]), &[0]).unwrap();
        assert_eq!(
            rule,
            SplitRule::Numeric {
                feature: 0,
                break_point: 1.5
            }
        );
    }

    #[test]
    fn categorical_pure_level_split() {
        let ds = Dataset::new(
            vec![FeatureColumn::categorical(
                "c",
                vec!["a".into(), "b".into(), "c".into()],
                vec![0, 0, 1, 1, 2, 2],
            )],
            Target::Classes {
                labels: vec!["p".into(), "q".into()],
                codes: vec![0, 0, 1, 1, 1, 1],
            },
        )
        .unwrap();
        let rule = best_split(&ds, Task::Classification, &bag(&[0, 1, 2, 3, 4, 5]), &[0]).unwrap();
        // level "a" alone is pure class p: left mask = {a}
        assert_eq!(
            rule,
            SplitRule::Categorical {
                feature: 0,
                left_mask: 0b001
            }
        );
    }

    #[test]
    fn multiplicity_weights_the_loss() {
        // Row 0 has weight 3; a split isolating it is better than isolating
        // row 2 only under weighting.
        let ds = Dataset::new(
            vec![FeatureColumn::numeric("x", vec![0.0, 1.0, 2.0])],
            Target::Numeric(vec![10.0, 0.0, 0.5]),
        )
        .unwrap();
        let rows = vec![
            BagRow { row: 0, count: 3 },
            BagRow { row: 1, count: 1 },
            BagRow { row: 2, count: 1 },
        ];
        let rule = best_split(&ds, Task::Regression, &rows, &[0]).unwrap();
        assert_eq!(
            rule,
            SplitRule::Numeric {
                feature: 0,
                break_point: 0.5
            }
        );
    }
}
