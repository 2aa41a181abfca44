use thiserror::Error;

/// Errors raised by the bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature did not reach its tolerance.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (partial value {value:e}, error estimate {error_estimate:e})"
    )]
    Convergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// An operation was called with a scenario of the wrong shape.
    #[error("usage error: {0}")]
    Usage(String),

    /// Required inputs are missing or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Rejects NaN and nonpositive values.
pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be a positive finite number, got {value}")))
    }
}
