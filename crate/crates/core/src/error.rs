//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: u64, msg: String },

    #[error("missing value at line {line}, column '{column}'")]
    MissingValue { line: u64, column: String },

    #[error("unseen categorical level '{level}' at row {row}, column '{column}'")]
    UnseenLevel {
        row: usize,
        column: String,
        level: String,
    },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("degenerate node: all class counts are zero")]
    DegenerateNode,

    #[error("degenerate estimator: {0}")]
    DegenerateEstimator(String),

    #[error("contribution variant mismatch: expected {expected}, got {got}")]
    VariantMismatch { expected: String, got: String },

    #[error("simplex embedding supports exactly 3 classes, got {0}")]
    UnsupportedSimplexDim(usize),

    #[error("row {row} is not a valid simplex point: {point:?}")]
    InvalidSimplexPoint { row: usize, point: Vec<f64> },

    #[error("model format version {found} not supported (expected {expected})")]
    FormatVersion { expected: u32, found: u32 },

    #[error("model checksum mismatch: header {expected}, computed {computed}")]
    ChecksumMismatch { expected: String, computed: String },

    #[error("model parse error: {0}")]
    ModelParse(String),

    #[error("simulation error: {0}")]
    Simulation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
