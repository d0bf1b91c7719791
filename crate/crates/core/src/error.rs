use thiserror::Error;

/// Errors raised by the engine. Axiom violations and empty point sets are
/// reported as data, never through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point arity {got} does not match geometry dimension {expected}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("point label {label} is not a valid index into a table of {len} points")]
    IndexOutOfRange { label: f64, len: usize },

    #[error("point has a non-finite coordinate")]
    NonFinite,

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("inapplicable point: {0}")]
    Inapplicable(String),

    #[error("grid of {nodes} nodes exceeds the node budget of {budget}")]
    BudgetExceeded { nodes: u128, budget: u64 },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("matrix is singular (|det| = {det:e})")]
    Singular { det: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
