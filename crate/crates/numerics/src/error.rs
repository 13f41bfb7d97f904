use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("singular matrix: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not Hermitian positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("value {value} outside table range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
}

impl NumericsError {
    pub fn is_singular(&self) -> bool {
        matches!(self, NumericsError::SingularMatrix { .. })
    }
}
