//! The plot suite: main-effect, interaction, simplex, and aligned-class
//! plots over contribution matrices, rendered to SVG with CSV sidecars.

pub mod color;
pub mod pca;
pub mod simplex;
pub mod svg;

pub use color::{class_color, palette_rgb, ColorGradient, GradientMapping, GradientSource, Rgb};
pub use pca::{fit_pca, pca_gradient, Pca};
pub use simplex::{simplex_coords, simplex_plot, SimplexSource};
pub use svg::{render_svg, svg_string, RenderOptions};

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::data::Dataset;
use crate::decompose::ContributionMatrix;
use crate::error::{Error, Result};
use crate::gov::{gov_interaction, gov_score, FittedKernel, GovReport, GovRequest, KernelConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    MainEffect,
    Interaction3d,
    Simplex,
    AlignedClass,
}

#[derive(Debug, Clone)]
pub struct PlotPoint {
    pub row: usize,
    pub x: f64,
    pub y: f64,
    pub z: Option<f64>,
    pub color: Rgb,
    pub class: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum Overlay {
    /// Fitted estimator curve.
    Curve(Vec<(f64, f64)>),
    /// Per-class fitted curves.
    Curves(Vec<(usize, Vec<(f64, f64)>)>),
    /// A family of thin background curves (e.g. per-row ICE curves) drawn
    /// under a highlighted mean curve.
    CurveFamily {
        family: Vec<Vec<(f64, f64)>>,
        mean: Vec<(f64, f64)>,
    },
    /// Fitted surface on a rectangular grid; `z` is x-major.
    Surface {
        xs: Vec<f64>,
        ys: Vec<f64>,
        z: Vec<f64>,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Annotations {
    pub gov: Option<f64>,
    pub base_rate_marker: Option<(f64, f64)>,
    pub clip_count: usize,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct PlotBundle {
    pub kind: PlotKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub z_label: Option<String>,
    /// Class labels for legends (classification bundles only).
    pub class_names: Option<Vec<String>>,
    pub points: Vec<PlotPoint>,
    pub overlay: Option<Overlay>,
    pub annotations: Annotations,
}

/// Fitted-estimator overlay grid along one feature.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn overlay_grid(dataset: &Dataset, feature: usize, n: usize) -> Vec<f64> {
    let col = &dataset.columns[feature];
    if col.is_categorical() {
        return (1..=col.n_levels()).map(|c| c as f64).collect();
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..dataset.n_rows {
        let v = col.numeric_coded(i);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// One feature's contributions against its own values. Classification rows
/// are plotted once per class; colors follow the gradient.
pub fn main_effect_plot(
    contributions: &ContributionMatrix,
    dataset: &Dataset,
    feature: usize,
    gradient: &ColorGradient,
    with_gov: Option<&KernelConfig>,
) -> Result<PlotBundle> {
    let col = &dataset.columns[feature];
    let c = contributions.n_outputs;
    let mut points = Vec::new();
    for i in 0..contributions.n_rows {
        if !contributions.is_defined(i) {
            continue;
        }
        for k in 0..c {
            points.push(PlotPoint {
                row: i,
                x: col.numeric_coded(i),
                y: contributions.get(i, feature + 1, k),
                z: None,
                color: gradient.colors[i],
                class: (c > 1).then_some(k),
            });
        }
    }

    let mut annotations = Annotations {
        note: gradient.note.clone(),
        ..Default::default()
    };
    let mut overlay = None;
    if let Some(kernel) = with_gov {
        match gov_score(
            contributions,
            dataset,
            &GovRequest {
                feature,
                context: vec![feature],
                class: None,
                kernel: kernel.clone(),
            },
        ) {
            Ok(report) => {
                annotations.gov = report.score;
                overlay = fit_overlay_curves(contributions, dataset, feature, &report, kernel)?;
            }
            Err(Error::DegenerateEstimator(msg)) => {
                annotations.note = Some(format!("gov unavailable: {msg}"));
            }
            Err(other) => return Err(other),
        }
    }

    Ok(PlotBundle {
        kind: PlotKind::MainEffect,
        title: format!("main effect: {}", col.name),
        x_label: col.name.clone(),
        y_label: format!("contribution ({})", col.name),
        z_label: None,
        class_names: (c > 1)
            .then(|| contributions.class_labels.clone())
            .flatten(),
        points,
        overlay,
        annotations,
    })
}

fn fit_overlay_curves(
    contributions: &ContributionMatrix,
    dataset: &Dataset,
    feature: usize,
    report: &GovReport,
    kernel: &KernelConfig,
) -> Result<Option<Overlay>> {
    let grid = overlay_grid(dataset, feature, 100);
    let rows = &report.rows_used;
    if rows.len() < 2 {
        return Ok(None);
    }
    let mut curves = Vec::new();
    for detail in &report.per_class {
        if detail.score.is_none() {
            continue;
        }
        let k = detail.class.unwrap_or(0);
        let responses: Vec<f64> = rows
            .iter()
            .map(|&i| contributions.get(i, feature + 1, k))
            .collect();
        let fitted = FittedKernel::fit(dataset, &[feature], rows, responses, kernel)?;
        let curve: Vec<(f64, f64)> = grid.iter().map(|&x| (x, fitted.predict(&[x]))).collect();
        curves.push((k, curve));
    }
    Ok(match (contributions.n_outputs, curves.len()) {
        (_, 0) => None,
        (1, _) => Some(Overlay::Curve(curves.pop().expect("one curve").1)),
        _ => Some(Overlay::Curves(curves)),
    })
}

/// All main-effect plots, ordered by contribution variance (descending).
pub fn main_effect_plots(
    contributions: &ContributionMatrix,
    dataset: &Dataset,
    gradient: &ColorGradient,
    with_gov: Option<&KernelConfig>,
) -> Result<Vec<PlotBundle>> {
    let mut order: Vec<usize> = (0..contributions.n_features).collect();
    order.sort_by(|&a, &b| {
        contributions
            .feature_variance(b)
            .total_cmp(&contributions.feature_variance(a))
            .then(a.cmp(&b))
    });
    order
        .into_iter()
        .map(|f| main_effect_plot(contributions, dataset, f, gradient, with_gov))
        .collect()
}

/// Contributions over a two-feature context: `z` is either feature `a`'s
/// contribution or the summed pair. Regression gets a fitted GOV surface.
pub fn interaction_plot(
    contributions: &ContributionMatrix,
    dataset: &Dataset,
    a: usize,
    b: usize,
    summed: bool,
    gradient: &ColorGradient,
    with_gov: Option<&KernelConfig>,
) -> Result<PlotBundle> {
    if a == b {
        return Err(Error::Config(
            "interaction plot needs two distinct features".into(),
        ));
    }
    let col_a = &dataset.columns[a];
    let col_b = &dataset.columns[b];
    let c = contributions.n_outputs;
    let mut points = Vec::new();
    for i in 0..contributions.n_rows {
        if !contributions.is_defined(i) {
            continue;
        }
        for k in 0..c {
            let mut z = contributions.get(i, a + 1, k);
            if summed {
                z += contributions.get(i, b + 1, k);
            }
            points.push(PlotPoint {
                row: i,
                x: col_a.numeric_coded(i),
                y: col_b.numeric_coded(i),
                z: Some(z),
                color: gradient.colors[i],
                class: (c > 1).then_some(k),
            });
        }
    }

    let z_name = if summed {
        format!("contribution ({}+{})", col_a.name, col_b.name)
    } else {
        format!("contribution ({})", col_a.name)
    };
    let mut annotations = Annotations {
        note: gradient.note.clone(),
        ..Default::default()
    };
    let mut overlay = None;
    if let Some(kernel) = with_gov {
        match gov_interaction(contributions, dataset, a, b, summed, kernel.clone()) {
            Ok(report) => {
                annotations.gov = report.score;
                if c == 1 {
                    let rows = &report.rows_used;
                    let responses: Vec<f64> = rows
                        .iter()
                        .map(|&i| {
                            let mut v = contributions.get(i, a + 1, 0);
                            if summed {
                                v += contributions.get(i, b + 1, 0);
                            }
                            v
                        })
                        .collect();
                    let fitted = FittedKernel::fit(dataset, &[a, b], rows, responses, kernel)?;
                    let xs = overlay_grid(dataset, a, 20);
                    let ys = overlay_grid(dataset, b, 20);
                    let mut z = Vec::with_capacity(xs.len() * ys.len());
                    for &x in &xs {
                        for &y in &ys {
                            z.push(fitted.predict(&[x, y]));
                        }
                    }
                    overlay = Some(Overlay::Surface { xs, ys, z });
                }
            }
            Err(Error::DegenerateEstimator(msg)) => {
                annotations.note = Some(format!("gov unavailable: {msg}"));
            }
            Err(other) => return Err(other),
        }
    }

    Ok(PlotBundle {
        kind: PlotKind::Interaction3d,
        title: format!("interaction: {} x {}", col_a.name, col_b.name),
        x_label: col_a.name.clone(),
        y_label: col_b.name.clone(),
        z_label: Some(z_name),
        class_names: (c > 1)
            .then(|| contributions.class_labels.clone())
            .flatten(),
        points,
        overlay,
        annotations,
    })
}

/// Every row plotted once per class on an aligned probability-change axis,
/// colored by class.
pub fn aligned_class_plot(
    contributions: &ContributionMatrix,
    dataset: &Dataset,
    feature: usize,
) -> Result<PlotBundle> {
    if contributions.n_outputs < 2 {
        return Err(Error::Config(
            "aligned class plot is a classification view".into(),
        ));
    }
    let col = &dataset.columns[feature];
    let mut points = Vec::new();
    for i in 0..contributions.n_rows {
        if !contributions.is_defined(i) {
            continue;
        }
        for k in 0..contributions.n_outputs {
            points.push(PlotPoint {
                row: i,
                x: col.numeric_coded(i),
                y: contributions.get(i, feature + 1, k),
                z: None,
                color: class_color(k),
                class: Some(k),
            });
        }
    }
    Ok(PlotBundle {
        kind: PlotKind::AlignedClass,
        title: format!("class contributions: {}", col.name),
        x_label: col.name.clone(),
        y_label: "probability change".into(),
        z_label: None,
        class_names: contributions.class_labels.clone(),
        points,
        overlay: None,
        annotations: Annotations::default(),
    })
}

/// Exact point table for a bundle: `row,x,y,z,class,color`.
pub fn bundle_to_csv(bundle: &PlotBundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("row,x,y,z,class,color\n");
    for p in &bundle.points {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.row,
            p.x,
            p.y,
            p.z.map(|z| z.to_string()).unwrap_or_default(),
            p.class.map(|c| c.to_string()).unwrap_or_default(),
            p.color.hex(),
        ));
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// One entry of the plot manifest the CLI writes next to rendered files.
#[derive(Debug, Clone, Serialize)]
pub struct PlotManifestEntry {
    pub kind: PlotKind,
    pub title: String,
    pub svg: String,
    pub csv: String,
    pub gov: Option<f64>,
    pub clip_count: usize,
    pub note: Option<String>,
}
