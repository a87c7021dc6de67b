//! Probability-simplex embedding for 3-class models.
//!
//! Vertices: class 1 at (0,0), class 2 at (1,0), class 3 at (1/2, sqrt(3)/2).

use crate::decompose::ContributionMatrix;
use crate::error::{Error, Result};
use crate::forest::PredictionMatrix;

use super::color::ColorGradient;
use super::{Annotations, PlotBundle, PlotKind, PlotPoint};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Barycentric embedding of a 3-class probability vector. `row` names the
/// source row in validation errors.
pub fn simplex_coords(point: &[f64], row: usize) -> Result<(f64, f64)> {
    if point.len() != 3 {
        return Err(Error::UnsupportedSimplexDim(point.len()));
    }
    let sum: f64 = point.iter().sum();
    if point.iter().any(|&p| p < -1e-12) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSimplexPoint {
            row,
            point: point.to_vec(),
        });
    }
    Ok(embed(point))
}

fn embed(p: &[f64]) -> (f64, f64) {
    (p[1] + 0.5 * p[2], SQRT3_2 * p[2])
}

/// Clamp negatives to zero and renormalize. Returns whether clipping moved
/// the point.
fn clip_to_simplex(p: &mut [f64]) -> bool {
    let clipped = p.iter().any(|&v| v < 0.0);
    if clipped {
        p.iter_mut().for_each(|v| *v = v.max(0.0));
        let sum: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= sum);
    }
    clipped
}

pub enum SimplexSource<'a> {
    /// Absolute predicted probabilities.
    Predictions(&'a PredictionMatrix),
    /// One feature's contribution displacement drawn at
    /// `base rate + contribution`, clipped to the simplex when a partial sum
    /// exits it (the clip count is reported on the bundle).
    Contributions {
        matrix: &'a ContributionMatrix,
        feature: usize,
    },
}

/// `base_rate` anchors contribution displacements; `marker` is the blue
/// cross (the effective prior: the stratification rate of a stratified
/// model, otherwise the training base rate).
pub fn simplex_plot(
    source: &SimplexSource<'_>,
    gradient: &ColorGradient,
    base_rate: &[f64],
    marker: &[f64],
    class_names: &[String],
    title: impl Into<String>,
) -> Result<PlotBundle> {
    let mut points = Vec::new();
    let mut clip_count = 0usize;
    match source {
        SimplexSource::Predictions(preds) => {
            if preds.n_outputs != 3 {
                return Err(Error::UnsupportedSimplexDim(preds.n_outputs));
            }
            for i in 0..preds.n_rows {
                if !preds.is_defined(i) {
                    continue;
                }
                let (x, y) = simplex_coords(preds.row(i), i)?;
                points.push(PlotPoint {
                    row: i,
                    x,
                    y,
                    z: None,
                    color: gradient.colors[i],
                    class: None,
                });
            }
        }
        SimplexSource::Contributions { matrix, feature } => {
            if matrix.n_outputs != 3 {
                return Err(Error::UnsupportedSimplexDim(matrix.n_outputs));
            }
            for i in 0..matrix.n_rows {
                if !matrix.is_defined(i) {
                    continue;
                }
                let mut p: Vec<f64> = (0..3)
                    .map(|k| base_rate[k] + matrix.get(i, feature + 1, k))
                    .collect();
                if clip_to_simplex(&mut p) {
                    clip_count += 1;
                }
                let (x, y) = simplex_coords(&p, i)?;
                points.push(PlotPoint {
                    row: i,
                    x,
                    y,
                    z: None,
                    color: gradient.colors[i],
                    class: None,
                });
            }
        }
    }
    let marker = simplex_coords(marker, 0)?;
    Ok(PlotBundle {
        kind: PlotKind::Simplex,
        title: title.into(),
        x_label: String::new(),
        y_label: String::new(),
        z_label: None,
        class_names: Some(class_names.to_vec()),
        points,
        overlay: None,
        annotations: Annotations {
            gov: None,
            base_rate_marker: Some(marker),
            clip_count,
            note: gradient.note.clone(),
        },
    })
}
