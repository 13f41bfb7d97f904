use bcs_coupling::CouplingError;
use bcs_node::NodeError;
use bcs_numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Node(#[from] NodeError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error("invalid parameter {field}: {reason}")]
    InvalidParameter { field: String, reason: String },
    #[error("coefficient bound violated: {0}")]
    CoefficientBoundViolation(String),
    #[error("passivity violated by {which}: residual {residual:.3e}")]
    PassivityViolation { which: String, residual: f64 },
    #[error("config: {0}")]
    Config(String),
}

pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter { field: field.into(), reason: reason.into() }
}
