use thiserror::Error;

/// Errors raised while constructing or evaluating coherent-state objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be finite")]
    NonFinite { what: &'static str },
    #[error("{what} must be strictly positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("commutator constraint violated: 2 Re(c1* c2) = {delta}, expected 1")]
    Constraint { delta: f64 },
    #[error("family coefficient {which} must be nonzero")]
    ZeroCoefficient { which: &'static str },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("requested Fock level {requested} exceeds the configured maximum {max}")]
    Capacity { requested: usize, max: usize },
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn ensure_finite(value: f64, what: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what })
    }
}

pub(crate) fn ensure_positive(value: f64, what: &'static str) -> Result<f64> {
    ensure_finite(value, what)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositive { what, value })
    }
}
