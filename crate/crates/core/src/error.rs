use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver, the sweeps and the output writers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A named input field failed validation (utilities, beliefs, grid settings).
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    /// No decay in the master equation (alpha = 0), so there is no steady state.
    #[error("degenerate dynamics: {0}")]
    DegenerateDynamics(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    /// The car's indifference condition has a zero denominator.
    #[error("car is never indifferent: {0}")]
    NoIndifference(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
