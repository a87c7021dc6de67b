//! Simulated datasets with a known hidden structure.
//!
//! The generators return the noiseless hidden value alongside the noisy
//! target so tests can use the true structure as an oracle. The noise scale
//! `k` in `y = G + k*eps` is solved on the realized sample (bisection) so
//! that the sample correlation `cor(G, y)` hits the requested value.

use crate::data::{Dataset, FeatureColumn, Target};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyGenerator {
    /// Six uniform features on `[-1, 1]`; `G = x1^2 + sin(2*pi*x2)/2 + x3*x4`,
    /// with `x5`, `x6` unrelated to the target.
    Toy4,
    /// Two uniform features on `[0, pi]`; `G = sin(x1)^8 * sin(x2)^8`,
    /// a single localized hill.
    SineHill,
}

#[derive(Debug, Clone)]
pub struct ToyConfig {
    pub n: usize,
    pub seed: u64,
    /// Requested sample correlation between the hidden value and the target.
    pub rho: f64,
    pub generator: ToyGenerator,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            n: 5000,
            seed: 1,
            rho: 0.75,
            generator: ToyGenerator::Toy4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulatedData {
    pub dataset: Dataset,
    /// Noiseless hidden value per row.
    pub hidden: Vec<f64>,
    /// Solved noise scale.
    pub noise_scale: f64,
}

pub fn toy4_g(x1: f64, x2: f64, x3: f64, x4: f64) -> f64 {
    x1 * x1 + 0.5 * (std::f64::consts::TAU * x2).sin() + x3 * x4
}

pub fn sinehill_g(x1: f64, x2: f64) -> f64 {
    x1.sin().powi(8) * x2.sin().powi(8)
}

pub fn simulate_toy(config: &ToyConfig) -> Result<SimulatedData> {
    if config.n < 10 {
        return Err(Error::Config(format!("n must be >= 10, got {}", config.n)));
    }
    if !(config.rho > 0.0 && config.rho <= 1.0) {
        return Err(Error::Config(format!(
            "rho must be in (0, 1], got {}",
            config.rho
        )));
    }
    let n = config.n;
    let mut feature_rng = StreamRng::for_stream(config.seed, 0);
    let mut noise_rng = StreamRng::for_stream(config.seed, 1);

    let (names, ranges): (Vec<&str>, (f64, f64)) = match config.generator {
        ToyGenerator::Toy4 => (vec!["x1", "x2", "x3", "x4", "x5", "x6"], (-1.0, 1.0)),
        ToyGenerator::SineHill => (vec!["x1", "x2"], (0.0, std::f64::consts::PI)),
    };
    let d = names.len();
    let mut features = vec![Vec::with_capacity(n); d];
    for _ in 0..n {
        for col in features.iter_mut() {
            col.push(feature_rng.next_range(ranges.0, ranges.1));
        }
    }

    let hidden: Vec<f64> = (0..n)
        .map(|i| match config.generator {
            ToyGenerator::Toy4 => toy4_g(
                features[0][i],
                features[1][i],
                features[2][i],
                features[3][i],
            ),
            ToyGenerator::SineHill => sinehill_g(features[0][i], features[1][i]),
        })
        .collect();
    let noise: Vec<f64> = (0..n).map(|_| noise_rng.next_normal()).collect();

    let k = solve_noise_scale(&hidden, &noise, config.rho)?;
    let y: Vec<f64> = hidden.iter().zip(&noise).map(|(g, e)| g + k * e).collect();

    let columns = names
        .into_iter()
        .zip(features)
        .map(|(name, values)| FeatureColumn::numeric(name, values))
        .collect();
    let dataset = Dataset::new(columns, Target::Numeric(y))?;
    Ok(SimulatedData {
        dataset,
        hidden,
        noise_scale: k,
    })
}

/// Sample correlation of `g` with `g + k*e`, from centered cross sums.
fn cor_at(sgg: f64, sge: f64, see: f64, k: f64) -> f64 {
    let cov = sgg + k * sge;
    let var_y = sgg + 2.0 * k * sge + k * k * see;
    cov / (sgg.sqrt() * var_y.sqrt())
}

fn solve_noise_scale(hidden: &[f64], noise: &[f64], rho: f64) -> Result<f64> {
    let n = hidden.len() as f64;
    let gm = hidden.iter().sum::<f64>() / n;
    let em = noise.iter().sum::<f64>() / n;
    let mut sgg = 0.0;
    let mut sge = 0.0;
    let mut see = 0.0;
    for (g, e) in hidden.iter().zip(noise) {
        let gc = g - gm;
        let ec = e - em;
        sgg += gc * gc;
        sge += gc * ec;
        see += ec * ec;
    }
    if sgg <= 0.0 {
        return Err(Error::Simulation(
            "hidden structure has zero variance; correlation target unreachable".into(),
        ));
    }
    if rho == 1.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while cor_at(sgg, sge, see, hi) > rho {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Simulation(format!(
                "could not reach correlation {rho} by scaling noise"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cor_at(sgg, sge, see, mid) > rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Replace a numeric target with `k` quantile-bin classes labeled `c1..ck`.
pub fn bin_target(dataset: &Dataset, k: usize) -> Result<Dataset> {
    let values = dataset
        .numeric_target()
        .ok_or_else(|| Error::Config("bin_target requires a numeric target".into()))?;
    if k < 2 {
        return Err(Error::Config("bin_target needs k >= 2".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let cuts: Vec<f64> = (1..k).map(|j| sorted[j * n / k]).collect();
    let codes: Vec<u32> = values
        .iter()
        .map(|&v| cuts.iter().take_while(|&&c| v >= c).count() as u32)
        .collect();
    let labels = (1..=k).map(|j| format!("c{j}")).collect();
    Dataset::new(dataset.columns.clone(), Target::Classes { labels, codes })
}
