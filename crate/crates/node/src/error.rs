use bcs_numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NodeError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("boundary trace is not right-invertible on the essential kernel (sigma_min {sigma_min:.3e})")]
    NotRightInvertible { sigma_min: f64 },
    #[error("passivity violated: residual {residual:.3e} per unit energy")]
    PassivityViolation { residual: f64 },
    #[error("requires Re λ > 0, got {re}")]
    RequiresOpenHalfPlane { re: f64 },
    #[error("transfer function not invertible (sigma_min {sigma_min:.3e})")]
    NotInvertibleTransfer { sigma_min: f64 },
    #[error("invalid feedback: {0}")]
    InvalidFeedback(String),
    #[error("non-finite entries in {0}")]
    NonFinite(String),
}

impl NodeError {
    pub fn is_singular(&self) -> bool {
        matches!(self, NodeError::Numerics(e) if e.is_singular())
    }
}
