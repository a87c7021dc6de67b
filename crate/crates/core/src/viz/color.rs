//! Color gradients over dataset rows.

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn hex(&self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

/// Fixed class palette: black, red, green, blue, then fallbacks.
pub const CLASS_PALETTE: [Rgb; 6] = [
    Rgb(0, 0, 0),
    Rgb(214, 39, 40),
    Rgb(44, 160, 44),
    Rgb(31, 119, 180),
    Rgb(255, 127, 14),
    Rgb(148, 103, 189),
];

pub fn class_color(class: usize) -> Rgb {
    CLASS_PALETTE[class % CLASS_PALETTE.len()]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradientSource {
    Feature(usize),
    Pca2,
    ClassLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMapping {
    /// `t` proportional to the value.
    Linear,
    /// `t` proportional to the value's rank; useful for skewed features.
    Rank,
}

/// Per-row colors plus the scalar position `t` that produced them (for the
/// one-feature gradients; `t` is the hue position along the palette).
#[derive(Debug, Clone)]
pub struct ColorGradient {
    pub source: GradientSource,
    pub mapping: GradientMapping,
    pub colors: Vec<Rgb>,
    /// Palette position per row in `[0, 1]`, when one-dimensional.
    pub positions: Option<Vec<f64>>,
    pub note: Option<String>,
}

/// Low values red, middle green, high blue.
pub fn palette_rgb(t: f64) -> Rgb {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64, s: f64| (a + (b - a) * s).round() as u8;
    if t <= 0.5 {
        let s = t * 2.0;
        Rgb(
            lerp(220.0, 0.0, s),
            lerp(30.0, 170.0, s),
            lerp(30.0, 60.0, s),
        )
    } else {
        let s = (t - 0.5) * 2.0;
        Rgb(
            lerp(0.0, 30.0, s),
            lerp(170.0, 60.0, s),
            lerp(60.0, 220.0, s),
        )
    }
}

pub(crate) fn hsl_to_rgb(h: f64, s: f64, l: f64) -> Rgb {
    let h = h.rem_euclid(360.0);
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    Rgb(
        ((r1 + m) * 255.0).round() as u8,
        ((g1 + m) * 255.0).round() as u8,
        ((b1 + m) * 255.0).round() as u8,
    )
}

impl ColorGradient {
    /// Gradient along one feature (categoricals through their integer
    /// coding).
    pub fn feature(dataset: &Dataset, feature: usize, mapping: GradientMapping) -> Result<Self> {
        let col = dataset
            .columns
            .get(feature)
            .ok_or_else(|| Error::Config(format!("no feature {feature}")))?;
        let raw: Vec<f64> = (0..dataset.n_rows).map(|i| col.numeric_coded(i)).collect();
        let positions = match mapping {
            GradientMapping::Linear => {
                let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let span = if hi > lo { hi - lo } else { 1.0 };
                raw.iter().map(|v| (v - lo) / span).collect::<Vec<f64>>()
            }
            GradientMapping::Rank => {
                let mut order: Vec<usize> = (0..raw.len()).collect();
                order.sort_unstable_by(|&a, &b| raw[a].total_cmp(&raw[b]).then(a.cmp(&b)));
                let mut pos = vec![0.0; raw.len()];
                let denom = (raw.len() - 1).max(1) as f64;
                for (rank, &i) in order.iter().enumerate() {
                    pos[i] = rank as f64 / denom;
                }
                pos
            }
        };
        let colors = positions.iter().map(|&t| palette_rgb(t)).collect();
        Ok(ColorGradient {
            source: GradientSource::Feature(feature),
            mapping,
            colors,
            positions: Some(positions),
            note: None,
        })
    }

    /// One color per row from its true class.
    pub fn class_label(codes: &[u32]) -> Self {
        ColorGradient {
            source: GradientSource::ClassLabel,
            mapping: GradientMapping::Linear,
            colors: codes.iter().map(|&c| class_color(c as usize)).collect(),
            positions: None,
            note: None,
        }
    }
}
