//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by generators, operators, solvers, and file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// A spec or config violates a documented precondition.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// Array shapes disagree between operands.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A binary file failed to parse; `offset` is the byte position of the problem.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: u64, message: String },

    /// A ratio with a zero denominator was requested.
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// An iterative solver diverged or produced NaN.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The requested operation is not supported by this method.
    #[error("capability error: {0}")]
    Capability(String),

    /// Every candidate in a grid search failed.
    #[error("all {count} variants failed: {first}")]
    AllVariantsFailed { count: usize, first: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
