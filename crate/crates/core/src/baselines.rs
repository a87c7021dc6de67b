//! Grid baselines: sensitivity analysis, partial dependence, ICE curves.
//!
//! All three probe the model over a grid on one or two varied features. SA
//! fixes the remaining features at the training centroid and projects one
//! slice; PD overwrites the varied features on every training row and
//! averages; ICE keeps the per-row curves that PD averages. PD is computed
//! as the row mean of the ICE evaluation, so `PD = mean(ICE)` holds exactly,
//! and SA runs the same evaluation on a synthetic centroid row, so it equals
//! that row's ICE curve exactly.
//!
//! Grid evaluation descends each tree once per row carrying the set of grid
//! points, splitting the set only at nodes that test a varied feature. This
//! routes every grid point exactly as a modified-row prediction would, at a
//! fraction of the cost.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::data::{ColumnValues, Dataset, FeatureColumn, Target};
use crate::error::{Error, Result};
use crate::forest::{ForestModel, SplitRule, Tree};

/// Grid values along one varied feature.
#[derive(Debug, Clone, PartialEq)]
pub enum GridAxis {
    Numeric(Vec<f64>),
    /// Categorical level codes.
    Levels(Vec<u32>),
}

impl GridAxis {
    pub fn len(&self) -> usize {
        match self {
            GridAxis::Numeric(v) => v.len(),
            GridAxis::Levels(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value at `i` on a numeric axis (levels use the `1..=K'` coding).
    pub fn coded(&self, i: usize) -> f64 {
        match self {
            GridAxis::Numeric(v) => v[i],
            GridAxis::Levels(v) => (v[i] + 1) as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub features: Vec<usize>,
    pub axes: Vec<GridAxis>,
}

pub const DEFAULT_GRID_CAP: usize = 50;

impl GridSpec {
    /// Observed-value grid: sorted unique values, thinned to at most `cap`
    /// quantile points; categorical features use every level.
    pub fn observed(dataset: &Dataset, features: &[usize], cap: usize) -> Result<Self> {
        if features.is_empty() || features.len() > 2 {
            return Err(Error::Config(
                "grids support one or two varied features".into(),
            ));
        }
        if features.len() == 2 && features[0] == features[1] {
            return Err(Error::Config("varied features must be distinct".into()));
        }
        let cap = cap.max(2);
        let mut axes = Vec::new();
        for &f in features {
            let col = dataset
                .columns
                .get(f)
                .ok_or_else(|| Error::Config(format!("no feature {f}")))?;
            let axis = match &col.values {
                ColumnValues::Numeric(values) => {
                    let mut sorted = values.clone();
                    sorted.sort_unstable_by(f64::total_cmp);
                    let mut unique = sorted.clone();
                    unique.dedup();
                    if unique.len() <= cap {
                        GridAxis::Numeric(unique)
                    } else {
                        let n = sorted.len();
                        let mut qs: Vec<f64> =
                            (0..cap).map(|i| sorted[i * (n - 1) / (cap - 1)]).collect();
                        qs.dedup();
                        GridAxis::Numeric(qs)
                    }
                }
                ColumnValues::Categorical { levels, .. } => {
                    GridAxis::Levels((0..levels.len() as u32).collect())
                }
            };
            if axis.is_empty() {
                return Err(Error::Config(format!(
                    "empty grid for feature '{}'",
                    col.name
                )));
            }
            axes.push(axis);
        }
        Ok(GridSpec {
            features: features.to_vec(),
            axes,
        })
    }

    /// Total grid points (cartesian for two features).
    pub fn n_points(&self) -> usize {
        self.axes.iter().map(GridAxis::len).product()
    }

    /// Numeric-coded coordinates of grid point `p` (first axis outermost).
    pub fn point_coords(&self, p: usize) -> Vec<f64> {
        match self.axes.len() {
            1 => vec![self.axes[0].coded(p)],
            2 => {
                let inner = self.axes[1].len();
                vec![self.axes[0].coded(p / inner), self.axes[1].coded(p % inner)]
            }
            _ => unreachable!("validated to 1 or 2 axes"),
        }
    }

    /// Per-axis value of grid point `p`.
    fn axis_value(&self, axis: usize, p: usize) -> AxisValue {
        let idx = match self.axes.len() {
            1 => p,
            2 => {
                if axis == 0 {
                    p / self.axes[1].len()
                } else {
                    p % self.axes[1].len()
                }
            }
            _ => unreachable!(),
        };
        match &self.axes[axis] {
            GridAxis::Numeric(v) => AxisValue::Num(v[idx]),
            GridAxis::Levels(v) => AxisValue::Lvl(v[idx]),
        }
    }
}

#[derive(Clone, Copy)]
enum AxisValue {
    Num(f64),
    Lvl(u32),
}

impl AxisValue {
    fn goes_left(&self, rule: &SplitRule) -> bool {
        match (rule, self) {
            (SplitRule::Numeric { break_point, .. }, AxisValue::Num(v)) => v <= break_point,
            (SplitRule::Categorical { left_mask, .. }, AxisValue::Lvl(code)) => {
                left_mask & (1 << code) != 0
            }
            _ => unreachable!("grid axis kind matches the split rule kind"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Sa,
    Pd,
}

/// PD or SA table: one prediction vector per grid point.
#[derive(Debug, Clone)]
pub struct CurveTable {
    pub kind: BaselineKind,
    pub grid: GridSpec,
    pub feature_names: Vec<String>,
    pub n_outputs: usize,
    /// Row-major `[point][output]`.
    pub values: Vec<f64>,
}

impl CurveTable {
    pub fn point(&self, p: usize) -> &[f64] {
        &self.values[p * self.n_outputs..(p + 1) * self.n_outputs]
    }
}

/// Per-row prediction curves over a single-feature grid.
#[derive(Debug, Clone)]
pub struct IceTable {
    pub feature: usize,
    pub feature_name: String,
    pub grid: GridSpec,
    pub n_outputs: usize,
    pub centered: bool,
    /// Row-major `[row][grid point][output]`.
    pub values: Vec<f64>,
    pub n_rows: usize,
}

impl IceTable {
    pub fn get(&self, row: usize, point: usize, output: usize) -> f64 {
        let g = self.grid.n_points();
        self.values[(row * g + point) * self.n_outputs + output]
    }

    /// Mean curve over rows (summed in ascending row order).
    pub fn mean_curve(&self) -> Vec<f64> {
        let g = self.grid.n_points();
        let c = self.n_outputs;
        let mut out = vec![0.0; g * c];
        for row in 0..self.n_rows {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot += self.values[row * g * c + i];
            }
        }
        out.iter_mut().for_each(|v| *v /= self.n_rows as f64);
        out
    }
}

/// Route the grid set through one tree for one row, accumulating terminal
/// predictions into `out` (`[point][output]`, `+=`).
#[allow(clippy::too_many_arguments)]
fn descend_grid(
    tree: &Tree,
    node: u32,
    cols: &[crate::forest::tree::QueryCol<'_>],
    row: usize,
    grid: &GridSpec,
    idxs: &mut [u32],
    out: &mut [f64],
    n_outputs: usize,
) {
    let n = &tree.nodes[node as usize];
    match (&n.split, n.children) {
        (Some(rule), Some((left, right))) => {
            let feature = rule.feature();
            if let Some(axis) = grid.features.iter().position(|&f| f == feature) {
                let mid =
                    partition_in_place(idxs, |p| grid.axis_value(axis, p as usize).goes_left(rule));
                let (l_idxs, r_idxs) = idxs.split_at_mut(mid);
                if !l_idxs.is_empty() {
                    descend_grid(tree, left, cols, row, grid, l_idxs, out, n_outputs);
                }
                if !r_idxs.is_empty() {
                    descend_grid(tree, right, cols, row, grid, r_idxs, out, n_outputs);
                }
            } else {
                let next = if cols[feature].goes_left(rule, row) {
                    left
                } else {
                    right
                };
                descend_grid(tree, next, cols, row, grid, idxs, out, n_outputs);
            }
        }
        _ => {
            for &p in idxs.iter() {
                let base = p as usize * n_outputs;
                for (slot, &v) in out[base..base + n_outputs].iter_mut().zip(&n.pred) {
                    *slot += v;
                }
            }
        }
    }
}

fn partition_in_place(idxs: &mut [u32], pred: impl Fn(u32) -> bool) -> usize {
    let mut store = 0;
    for i in 0..idxs.len() {
        if pred(idxs[i]) {
            idxs.swap(store, i);
            store += 1;
        }
    }
    store
}

/// Grid predictions for every row of `dataset`: `[row][point][output]`.
fn grid_eval(model: &ForestModel, dataset: &Dataset, grid: &GridSpec) -> Result<Vec<f64>> {
    let cols = model.resolve_query(dataset)?;
    let c = model.n_outputs();
    let g = grid.n_points();
    let mut values = vec![0.0; dataset.n_rows * g * c];
    values
        .par_chunks_mut(g * c)
        .enumerate()
        .for_each(|(row, out)| {
            let mut idxs: Vec<u32> = (0..g as u32).collect();
            for tree in &model.trees {
                idxs.iter_mut().zip(0..g as u32).for_each(|(s, v)| *s = v);
                descend_grid(tree, 0, &cols, row, grid, &mut idxs, out, c);
            }
            out.iter_mut().for_each(|v| *v /= model.trees.len() as f64);
        });
    Ok(values)
}

/// ICE: one prediction curve per training row over a single-feature grid.
pub fn ice_curves(
    model: &ForestModel,
    dataset: &Dataset,
    grid: &GridSpec,
    centered: bool,
) -> Result<IceTable> {
    if grid.features.len() != 1 {
        return Err(Error::Config("ice curves vary a single feature".into()));
    }
    let mut values = grid_eval(model, dataset, grid)?;
    let g = grid.n_points();
    let c = model.n_outputs();
    if centered {
        for row in 0..dataset.n_rows {
            let base = row * g * c;
            let anchor: Vec<f64> = values[base..base + c].to_vec();
            for p in 0..g {
                for k in 0..c {
                    values[base + p * c + k] -= anchor[k];
                }
            }
        }
    }
    Ok(IceTable {
        feature: grid.features[0],
        feature_name: dataset.columns[grid.features[0]].name.clone(),
        grid: grid.clone(),
        n_outputs: c,
        centered,
        values,
        n_rows: dataset.n_rows,
    })
}

/// Partial dependence: for each grid point, the mean prediction over all
/// training rows with the varied features overwritten.
pub fn partial_dependence(
    model: &ForestModel,
    dataset: &Dataset,
    grid: &GridSpec,
) -> Result<CurveTable> {
    let values = grid_eval(model, dataset, grid)?;
    let g = grid.n_points();
    let c = model.n_outputs();
    let mut means = vec![0.0; g * c];
    for row in 0..dataset.n_rows {
        for i in 0..g * c {
            means[i] += values[row * g * c + i];
        }
    }
    means.iter_mut().for_each(|v| *v /= dataset.n_rows as f64);
    Ok(CurveTable {
        kind: BaselineKind::Pd,
        grid: grid.clone(),
        feature_names: grid
            .features
            .iter()
            .map(|&f| dataset.columns[f].name.clone())
            .collect(),
        n_outputs: c,
        values: means,
    })
}

/// The training centroid as a one-row dataset: numeric means, categorical
/// modes (lowest code on ties). The target value is a placeholder.
pub fn centroid_row(dataset: &Dataset) -> Dataset {
    let columns = dataset
        .columns
        .iter()
        .map(|col| match &col.values {
            ColumnValues::Numeric(v) => {
                let mean = v.iter().sum::<f64>() / v.len() as f64;
                FeatureColumn::numeric(col.name.clone(), vec![mean])
            }
            ColumnValues::Categorical { levels, codes } => {
                let mut counts = vec![0usize; levels.len()];
                for &c in codes {
                    counts[c as usize] += 1;
                }
                let mode = counts
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                    .map(|(i, _)| i as u32)
                    .unwrap_or(0);
                FeatureColumn::categorical(col.name.clone(), levels.clone(), vec![mode])
            }
        })
        .collect();
    let target = match &dataset.target {
        Target::Numeric(_) => Target::Numeric(vec![0.0]),
        Target::Classes { labels, .. } => Target::Classes {
            labels: labels.clone(),
            codes: vec![0],
        },
    };
    Dataset::new(columns, target).expect("centroid of a valid dataset")
}

/// Sensitivity analysis: predictions over the grid with all other features
/// fixed at the training centroid.
pub fn sensitivity_analysis(
    model: &ForestModel,
    dataset: &Dataset,
    grid: &GridSpec,
) -> Result<CurveTable> {
    let centroid = centroid_row(dataset);
    let values = grid_eval(model, &centroid, grid)?;
    Ok(CurveTable {
        kind: BaselineKind::Sa,
        grid: grid.clone(),
        feature_names: grid
            .features
            .iter()
            .map(|&f| dataset.columns[f].name.clone())
            .collect(),
        n_outputs: model.n_outputs(),
        values,
    })
}

fn output_headers(n_outputs: usize, labels: Option<&[String]>) -> Vec<String> {
    match labels {
        Some(labels) => labels.iter().map(|l| format!("pred_{l}")).collect(),
        None => {
            if n_outputs == 1 {
                vec!["prediction".into()]
            } else {
                (0..n_outputs).map(|k| format!("pred_{k}")).collect()
            }
        }
    }
}

/// CSV: grid coordinates, then `PD`/`SA` in the row column, then one
/// prediction column per output.
pub fn curve_to_csv(
    table: &CurveTable,
    labels: Option<&[String]>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let mut header = table.feature_names.clone();
    header.push("row".into());
    header.extend(output_headers(table.n_outputs, labels));
    out.push_str(&header.join(","));
    out.push('\n');
    let tag = match table.kind {
        BaselineKind::Sa => "SA",
        BaselineKind::Pd => "PD",
    };
    for p in 0..table.grid.n_points() {
        let mut fields: Vec<String> = table
            .grid
            .point_coords(p)
            .iter()
            .map(|v| format!("{v}"))
            .collect();
        fields.push(tag.to_string());
        fields.extend(table.point(p).iter().map(|v| format!("{v}")));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// CSV of ICE curves: grid coordinate, row id, one prediction per output.
pub fn ice_to_csv(
    table: &IceTable,
    labels: Option<&[String]>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let mut header = vec![table.feature_name.clone(), "row".into()];
    header.extend(output_headers(table.n_outputs, labels));
    out.push_str(&header.join(","));
    out.push('\n');
    for row in 0..table.n_rows {
        for p in 0..table.grid.n_points() {
            let mut fields = vec![
                format!("{}", table.grid.point_coords(p)[0]),
                row.to_string(),
            ];
            for k in 0..table.n_outputs {
                fields.push(format!("{}", table.get(row, p, k)));
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{train_forest, Task, TrainConfig};
    use crate::sim::{simulate_toy, ToyConfig};

    fn toy_model(n: usize, n_tree: usize, seed: u64) -> (Dataset, ForestModel) {
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
    fn pd_is_mean_of_ice_exactly() {
        let (ds, model) = toy_model(120, 15, 40);
        let grid = GridSpec::observed(&ds, &[1], 25).unwrap();
        let ice = ice_curves(&model, &ds, &grid, false).unwrap();
        let pd = partial_dependence(&model, &ds, &grid).unwrap();
        assert_eq!(pd.values, ice.mean_curve());
    }

    #[test]
    fn sa_equals_centroid_ice_exactly() {
        let (ds, model) = toy_model(100, 10, 41);
        let grid = GridSpec::observed(&ds, &[0], 20).unwrap();
        let sa = sensitivity_analysis(&model, &ds, &grid).unwrap();
        let centroid = centroid_row(&ds);
        let ice = ice_curves(&model, &centroid, &grid, false).unwrap();
        assert_eq!(sa.values, ice.values);
    }

    #[test]
    fn grid_eval_matches_modified_row_predictions() {
        let (ds, model) = toy_model(60, 8, 42);
        let grid = GridSpec::observed(&ds, &[2], 10).unwrap();
        let ice = ice_curves(&model, &ds, &grid, false).unwrap();
        let GridAxis::Numeric(values) = &grid.axes[0] else {
            panic!("numeric axis");
        };
        for (p, &v) in values.iter().enumerate() {
            let mut modified = ds.clone();
            let ColumnValues::Numeric(col) = &mut modified.columns[2].values else {
                unreachable!()
            };
            col.iter_mut().for_each(|x| *x = v);
            let preds = model.predict(&modified).unwrap();
            for row in 0..ds.n_rows {
                assert_eq!(ice.get(row, p, 0), preds.row(row)[0]);
            }
        }
    }

    #[test]
    fn constant_forest_gives_flat_sa() {
        let ds = Dataset::new(
            vec![FeatureColumn::numeric(
                "x",
                (0..30).map(|i| i as f64).collect(),
            )],
            Target::Numeric(vec![2.5; 30]),
        )
        .unwrap();
        let model = train_forest(
            &ds,
            &TrainConfig {
                n_tree: 5,
                ..TrainConfig::new(Task::Regression)
            },
        )
        .unwrap();
        let grid = GridSpec::observed(&ds, &[0], 50).unwrap();
        let sa = sensitivity_analysis(&model, &ds, &grid).unwrap();
        for p in 0..grid.n_points() {
            assert_eq!(sa.point(p)[0], 2.5);
        }
    }

    #[test]
    fn pd_over_an_ignored_feature_is_the_mean_prediction() {
        let n = 50;
        let x1: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let dead: Vec<f64> = (0..n).map(|i| ((i * 7) % 13) as f64).collect();
        let y: Vec<f64> = x1.iter().map(|v| v * 2.0).collect();
        let ds = Dataset::new(
            vec![
                FeatureColumn::numeric("x1", x1),
                FeatureColumn::numeric("dead", dead),
            ],
            Target::Numeric(y),
        )
        .unwrap();
        let cfg = TrainConfig {
            n_tree: 10,
            seed: 3,
            mtry: Some(1),
            ..TrainConfig::new(Task::Regression)
        };
        // mtry 1 may still pick "dead"; retrain until no tree splits on it
        // would be flaky, so force splits onto x1 by making dead constant.
        let mut ds2 = ds.clone();
        let ColumnValues::Numeric(col) = &mut ds2.columns[1].values else {
            unreachable!()
        };
        col.iter_mut().for_each(|v| *v = 1.0);
        let model = train_forest(&ds2, &cfg).unwrap();
        let grid = GridSpec {
            features: vec![1],
            axes: vec![GridAxis::Numeric(vec![0.0, 1.0, 2.0])],
        };
        let pd = partial_dependence(&model, &ds2, &grid).unwrap();
        let preds = model.predict(&ds2).unwrap();
        let mean: f64 = (0..ds2.n_rows).map(|i| preds.row(i)[0]).sum::<f64>() / ds2.n_rows as f64;
        for p in 0..3 {
            assert!((pd.point(p)[0] - mean).abs() <= 1e-12);
        }
    }

    #[test]
    fn two_feature_grid_has_cartesian_size() {
        let (ds, model) = toy_model(50, 4, 44);
        let grid = GridSpec {
            features: vec![0, 1],
            axes: vec![
                GridAxis::Numeric(vec![-0.5, 0.0, 0.5]),
                GridAxis::Numeric(vec![-0.25, 0.25]),
            ],
        };
        let pd = partial_dependence(&model, &ds, &grid).unwrap();
        assert_eq!(grid.n_points(), 6);
        assert_eq!(pd.values.len(), 6);
        assert_eq!(grid.point_coords(0), vec![-0.5, -0.25]);
        assert_eq!(grid.point_coords(1), vec![-0.5, 0.25]);
        assert_eq!(grid.point_coords(5), vec![0.5, 0.25]);
    }

    #[test]
    fn centered_ice_passes_through_zero() {
        let (ds, model) = toy_model(80, 8, 45);
        let grid = GridSpec::observed(&ds, &[0], 15).unwrap();
        let ice = ice_curves(&model, &ds, &grid, true).unwrap();
        for row in 0..ds.n_rows {
            assert_eq!(ice.get(row, 0, 0), 0.0);
        }
    }

    #[test]
    fn categorical_feature_grids_use_every_level() {
        let n = 60;
        let codes: Vec<u32> = (0..n).map(|i| (i % 3) as u32).collect();
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let y: Vec<f64> = (0..n).map(|i| (i % 3) as f64 + 0.1 * i as f64).collect();
        let ds = Dataset::new(
            vec![
                FeatureColumn::categorical("c", vec!["a".into(), "b".into(), "z".into()], codes),
                FeatureColumn::numeric("x", x),
            ],
            Target::Numeric(y),
        )
        .unwrap();
        let model = train_forest(
            &ds,
            &TrainConfig {
                n_tree: 10,
                seed: 9,
                ..TrainConfig::new(Task::Regression)
            },
        )
        .unwrap();
        let grid = GridSpec::observed(&ds, &[0], 50).unwrap();
        assert_eq!(grid.axes[0], GridAxis::Levels(vec![0, 1, 2]));
        assert_eq!(grid.n_points(), 3);
        // coded coordinates use the 1..=K' integer coding
        assert_eq!(grid.point_coords(0), vec![1.0]);
        let pd = partial_dependence(&model, &ds, &grid).unwrap();
        assert_eq!(pd.values.len(), 3);
    }

    #[test]
    fn pd_on_single_point_grid_is_mean_of_modified_dataset() {
        let (ds, model) = toy_model(70, 6, 46);
        let grid = GridSpec {
            features: vec![0],
            axes: vec![GridAxis::Numeric(vec![0.3])],
        };
        let pd = partial_dependence(&model, &ds, &grid).unwrap();
        let mut modified = ds.clone();
        let ColumnValues::Numeric(col) = &mut modified.columns[0].values else {
            unreachable!()
        };
        col.iter_mut().for_each(|v| *v = 0.3);
        let preds = model.predict(&modified).unwrap();
        let mean: f64 = (0..ds.n_rows).map(|i| preds.row(i)[0]).sum::<f64>() / ds.n_rows as f64;
        assert!((pd.point(0)[0] - mean).abs() <= 1e-12);
    }
}
