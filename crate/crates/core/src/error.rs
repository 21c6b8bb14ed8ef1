//! Error type shared by all modules.

use thiserror::Error;

/// Errors reported by the numeric kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain: {0}")]
    Domain(String),

    /// A request exceeds a configured capacity (table size, derivative order).
    #[error("capacity: {0}")]
    Capacity(String),

    /// An iterative scheme stopped before reaching its accuracy target.
    /// Carries the best value obtained so far and its error estimate.
    #[error("accuracy: {message} (partial value {partial:e}, error estimate {error_estimate:e})")]
    Accuracy {
        message: String,
        partial: f64,
        error_estimate: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn capacity(msg: impl Into<String>) -> Error {
    Error::Capacity(msg.into())
}
