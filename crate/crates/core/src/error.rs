use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("index {index} out of range 0..={max}")]
    OutOfRange { index: usize, max: usize },
    #[error(
        "quadrature for {term} did not converge (last estimate {estimate:e}, change {delta:e})"
    )]
    Quadrature {
        term: &'static str,
        estimate: f64,
        delta: f64,
    },
    #[error("{term} evaluated to {value:e}, outside [0, 1] beyond rounding")]
    ModelInconsistency { term: &'static str, value: f64 },
    #[error("threshold too high for oracle: acceptance fraction {fraction:e}")]
    ThresholdTooHigh { fraction: f64 },
    #[error("invalid simulation setup: {0}")]
    InvalidSimulation(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// Re-labels a quadrature failure with the formula term it came from.
    pub(crate) fn in_term(self, term: &'static str) -> Self {
        match self {
            Error::Quadrature {
                estimate, delta, ..
            } => Error::Quadrature {
                term,
                estimate,
                delta,
            },
            other => other,
        }
    }
}
