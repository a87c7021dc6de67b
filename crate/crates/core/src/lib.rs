//! Random forest interpretation toolkit.
//!
//! Trains regression and probabilistic classification forests while keeping
//! the full in-bag record, decomposes every prediction into additive
//! per-feature contributions (plain and out-of-bag cross validated),
//! quantifies how much of a contribution's variance a low-dimensional plot
//! explains, and renders the plot suite to SVG plus machine-readable
//! sidecar tables. Grid baselines (sensitivity analysis, partial dependence,
//! ICE curves) are included for comparison.

pub mod baselines;
pub mod data;
pub mod decompose;
pub mod error;
pub mod forest;
pub mod gov;
pub mod model_io;
pub mod rng;
pub mod sim;
pub mod viz;

pub use data::{ColumnValues, Dataset, FeatureColumn, Target};
pub use decompose::{ContributionMatrix, ContributionVariant, IncrementTrace};
pub use error::{Error, Result};
pub use forest::{ForestModel, PredictionMatrix, SplitRule, Task, TrainConfig, Tree, TreeNode};
pub use gov::{GovReport, GovRequest, KernelConfig};
pub use sim::{ToyConfig, ToyGenerator};
pub use viz::{ColorGradient, PlotBundle, Rgb};
