use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("alternative `{id}`: {detail}")]
    RaggedSeries { id: String, detail: String },

    #[error("label {label} is outside 1..={classes}")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("non-finite value in {0}")]
    NonFiniteValue(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value function has zero total range; cannot normalize")]
    ZeroScale,

    #[error("only one class is present; no preference pairs can be formed")]
    SingleClass,

    #[error("class {0} has no training alternatives")]
    EmptyClass(usize),

    #[error("solver did not converge after {iterations} iterations (KKT residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },

    #[error("too few samples ({n}) for {k} folds with the requested ratios")]
    TooFewSamples { n: usize, k: usize },

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("{path}: row {row}, column {column}: {message}")]
    Parse { path: PathBuf, row: usize, column: usize, message: String },

    #[error("header mismatch: {0}")]
    HeaderMismatch(String),

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersionMismatch { found: i64, expected: i64 },

    #[error("unknown or mismatched model kind `{0}`")]
    Kind(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch { expected: expected.to_string(), found: found.to_string() }
    }
}
