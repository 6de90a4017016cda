//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |m - m†| = {deviation:.3e}, tolerance {tolerance:.1e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("trace is {trace:.12} but must be 1 within {tolerance:.1e}")]
    InvalidTrace { trace: f64, tolerance: f64 },

    #[error("probabilities must be nonnegative and sum to 1 within {tolerance:.1e} (sum = {sum:.15})")]
    InvalidDistribution { sum: f64, tolerance: f64 },

    #[error("invalid channel state at input pair ({x1}, {x2}): {reason}")]
    InvalidChannelState { x1: usize, x2: usize, reason: String },

    #[error("channel file is invalid: {0}")]
    ChannelFormat(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no classical variable named {0:?} in this state")]
    UnknownVariable(String),

    #[error("computation guard exceeded: {what} = {got} exceeds limit {limit}")]
    GuardExceeded { what: &'static str, got: u128, limit: u128 },

    #[error("entropic inconsistency: {0}")]
    EntropicInconsistency(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
