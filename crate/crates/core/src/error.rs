use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The closed-form fidelity only holds at a fixed phase configuration.
    #[error("phase convention violated: {0}")]
    PhaseConvention(String),

    #[error("value {value} outside the admissible domain: {context}")]
    Domain { value: f64, context: String },

    #[error("numerical procedure did not converge: {0}")]
    Convergence(String),

    #[error("brute-force optimum {found} is not on the principal branch (expected {expected})")]
    BranchMismatch { found: f64, expected: f64 },

    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite, got {value}")))
    }
}
