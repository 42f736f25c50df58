//! Error type shared across the crate.

/// Errors produced by validation, linear algebra, and the experiment
/// harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("asymmetry {max_asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    AsymmetryExceedsTolerance { max_asymmetry: f64, tolerance: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("symmetric eigensolver did not converge within {max_sweeps} sweeps")]
    NoConvergence { max_sweeps: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operation requires dimension {expected}, got {actual}")]
    WrongDimension { expected: usize, actual: usize },
    #[error("geodesic weight {value} outside [0, 1]")]
    WeightOutOfRange { value: f64 },
    #[error("congruence transform is singular")]
    SingularTransform,
    #[error("no non-degenerate sphere direction found in {attempts} attempts")]
    DegenerateDirection { attempts: usize },
    #[error("input is empty")]
    EmptyInput,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("init index {index} out of bounds for dataset of size {len}")]
    InvalidInitIndex { index: usize, len: usize },
    #[error("k = {k} exceeds the number of data points {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("cluster {id} is empty")]
    EmptyCluster { id: usize },
    #[error("dataset has no ground-truth labels")]
    MissingTruth,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error(
        "center sampling exhausted after {attempts} attempts: \
         achieved pairwise separation {achieved:.4}, required {required:.4}"
    )]
    CenterSamplingExhausted {
        attempts: usize,
        achieved: f64,
        required: f64,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
