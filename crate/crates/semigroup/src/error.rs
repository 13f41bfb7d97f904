use bcs_coupling::CouplingError;
use bcs_numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemigroupError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error("invalid trajectory config: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("generator is singular at both probes λ = 0 and λ = {fallback:e}")]
    SingularAtProbes { fallback: f64 },
    #[error("constraint residual {residual:.3e} exceeds {tol:.1e}")]
    ConstraintResidual { residual: f64, tol: f64 },
    #[error("window holds {got} samples above the noise floor, need {needed}")]
    WindowBelowNoiseFloor { needed: usize, got: usize },
    #[error("csv: {0}")]
    Csv(String),
}

impl SemigroupError {
    pub fn is_singular(&self) -> bool {
        match self {
            SemigroupError::Numerics(e) => e.is_singular(),
            SemigroupError::Coupling(e) => e.is_singular(),
            SemigroupError::SingularAtProbes { .. } => true,
            _ => false,
        }
    }
}
