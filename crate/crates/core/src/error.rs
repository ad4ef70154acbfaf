use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("exponent below 1 at node {node}: {value}")]
    ExponentBelowOne { node: usize, value: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("aliasing: boundary mass {mass:.3e} exceeds {threshold:.3e}")]
    Aliasing { mass: f64, threshold: f64 },

    #[error("picard iteration diverged at iteration {iteration}: norm {norm:.6e}")]
    Divergence { iteration: usize, norm: f64 },

    #[error("empty corpus: {0}")]
    EmptyCorpus(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn hypothesis(msg: impl Into<String>) -> Error {
    Error::Hypothesis(msg.into())
}
