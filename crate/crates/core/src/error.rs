use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {t} lies outside the domain [{a}, {b}]")]
    Domain { t: f64, a: f64, b: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain mismatch: [{a0}, {b0}] vs [{a1}, {b1}]")]
    DomainMismatch { a0: f64, b0: f64, a1: f64, b1: f64 },

    #[error("invalid breakpoints: {0}")]
    Breakpoints(String),

    #[error("nonlinearity `{0}` carries no derivative growth certificate")]
    MissingDerivativeGrowth(String),

    #[error("exponent contract violated: {0}")]
    ExponentContract(String),

    #[error("histories are not in the same quotient class (seminorm distance {0:e})")]
    NotEquivalent(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
