use thiserror::Error;

#[derive(Debug, Error)]
pub enum MsdError {
    /// A user-supplied parameter failed validation. `field` names the offender.
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("time grid is empty")]
    EmptyGrid,

    #[error("time grid must be strictly increasing and nonnegative (at index {index})")]
    BadGrid { index: usize },

    #[error(
        "thermal member was built on a different basis (member K = {member}, basis K = {basis})"
    )]
    BasisMismatch { member: usize, basis: usize },

    #[error("numerical check failed: {0}")]
    Numerical(String),
}

impl MsdError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        MsdError::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, MsdError>;

/// Rejects NaN, infinities and values `<= 0`.
pub(crate) fn require_positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(MsdError::invalid(
            field,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

pub(crate) fn require_nonnegative(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(MsdError::invalid(
            field,
            format!("must be nonnegative and finite, got {value}"),
        ))
    }
}
