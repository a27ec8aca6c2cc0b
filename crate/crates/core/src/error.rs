use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// The true value exceeds the range of `f64`; use the log-valued variant.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A series ran out of terms before meeting its tolerance.
    #[error("series did not converge after {terms} terms (partial value {partial:e}, tail estimate {tail:e})")]
    NonConvergence {
        partial: f64,
        tail: f64,
        terms: usize,
    },

    /// A quantity that should be finite diverges for the given arguments.
    #[error("divergent: {0}")]
    Divergent(String),

    /// Adaptive quadrature exhausted its node budget.
    #[error("quadrature failed: {reason} (estimate {estimate:e}, error {error:e})")]
    Quadrature {
        reason: String,
        estimate: f64,
        error: f64,
    },

    /// Raising would push significant amplitude past the truncated Fock window.
    #[error("raising moves amplitude {amplitude:e} out of the truncation window")]
    TruncationOverflow { amplitude: f64 },

    /// Two independent evaluation routes disagree.
    #[error("evaluation routes disagree: primary {primary:e}, referee {referee:e}")]
    RouteMismatch { primary: f64, referee: f64 },

    /// A function is singular or its value underflowed where it is needed as a divisor.
    #[error("singular: {0}")]
    Singular(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive")))
    }
}

pub(crate) fn ensure_non_negative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be non-negative")))
    }
}
