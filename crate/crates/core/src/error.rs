use thiserror::Error;

/// Errors raised when a model input violates one of its invariants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid {field} = {value}: requires {requirement}")]
    Invalid {
        field: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("consumer {index}: no draw with alpha >= beta after {attempts} attempts")]
    RejectionCap { index: usize, attempts: usize },

    #[error("truncated normal on [{lo}, {hi}] produced no sample after {attempts} attempts")]
    TruncationCap { lo: f64, hi: f64, attempts: usize },

    #[error("sweep grid is empty")]
    EmptyGrid,

    #[error("at least one strategy cell is required")]
    NoStrategies,
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

/// Fails with [`ModelError::Invalid`] unless `ok` holds.
pub(crate) fn require(ok: bool, field: &'static str, value: f64, requirement: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::Invalid {
            field,
            value,
            requirement,
        })
    }
}

pub(crate) fn require_money(field: &'static str, value: f64) -> Result<()> {
    require(value.is_finite() && value >= 0.0, field, value, "a finite value >= 0")
}
