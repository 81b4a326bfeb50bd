use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("edge ({u}, {v}) not found")]
    EdgeNotFound { u: usize, v: usize },

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Every entry must be finite and strictly positive.
pub(crate) fn check_positive(what: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        None => Ok(()),
        Some(i) => Err(Error::Domain(format!(
            "{what}[{i}] = {} is not strictly positive",
            values[i]
        ))),
    }
}
