use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by ranklab operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    Convergence {
        iterations: usize,
        residual: f64,
        /// Last iterate, probability-normalized.
        last: Vec<f64>,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
