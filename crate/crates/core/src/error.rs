//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input vector too short, constant, or containing non-finite values.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("failed to access {path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed CSV / JSON contents (missing grade column, stray text cell,
    /// out-of-range feature value, bad model file).
    #[error("schema error: {0}")]
    Schema(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("grade {value} outside [0, 100]")]
    OutOfRange { value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Invalid synthetic-dataset specification.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// Invalid configuration value (non-positive sigma_ref, step fraction
    /// outside (0, 1], ...).
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("need at least 3 classes to assign tiers, got {got}")]
    TooFewClasses { got: usize },

    #[error("batch normalization needs a batch of at least 2 rows in training mode, got {got}")]
    BatchTooSmall { got: usize },

    /// Inference requested before any training step populated running statistics.
    #[error("model is unfitted: no training step has been seen")]
    Unfitted,

    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },

    /// Forward cache does not match the network it is replayed against.
    #[error("stale forward cache: {0}")]
    StaleCache(String),

    #[error("unknown layout or ablation kind: {0}")]
    InvalidKind(String),

    #[error("length mismatch: {left} predictions vs {right} labels")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    TrainingDiverged { epoch: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
