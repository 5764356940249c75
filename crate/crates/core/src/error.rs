use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point is not in the feasible set (distance {distance:e} exceeds tolerance {tol:e})")]
    Infeasible { distance: f64, tol: f64 },

    #[error("objective undefined at this point: {0}")]
    Domain(String),

    #[error("rate fit failed: {0}")]
    Fit(String),

    #[error("trace too short: need {needed} records, have {available}")]
    TraceTooShort { needed: usize, available: usize },

    #[error("{0}")]
    Mismatch(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
