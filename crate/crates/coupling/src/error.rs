use bcs_node::NodeError;
use bcs_numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CouplingError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Node(#[from] NodeError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{which} is not passive: residual {residual:.3e}")]
    PassivityViolation { which: String, residual: f64 },
    #[error("coupled operator is not dissipative: residual {residual:.3e} per unit energy")]
    NotDissipative { residual: f64 },
    #[error("Re P2(λ) is not coercive: min eigenvalue {min_eig:.3e}")]
    CoercivityFailure { min_eig: f64 },
    #[error("non-finite entries in {0}")]
    NonFinite(String),
}

impl CouplingError {
    pub fn is_singular(&self) -> bool {
        match self {
            CouplingError::Numerics(e) => e.is_singular(),
            CouplingError::Node(e) => e.is_singular(),
            _ => false,
        }
    }
}

