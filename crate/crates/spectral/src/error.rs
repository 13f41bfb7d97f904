use bcs_coupling::CouplingError;
use bcs_node::NodeError;
use bcs_numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Node(#[from] NodeError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("rate function is not strictly decreasing")]
    NotDecreasing,
    #[error("rate function is not nondecreasing")]
    NotNondecreasing,
    #[error("value {value} outside table range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },
}

impl SpectralError {
    pub fn is_singular(&self) -> bool {
        match self {
            SpectralError::Numerics(e) => e.is_singular(),
            SpectralError::Node(e) => e.is_singular(),
            SpectralError::Coupling(e) => e.is_singular(),
            _ => false,
        }
    }
}

/// `OutOfRange` from the table keeps its variant.
pub(crate) fn table_error(e: NumericsError) -> SpectralError {
    match e {
        NumericsError::OutOfRange { value, min, max } => SpectralError::OutOfRange { value, min, max },
        other => SpectralError::Numerics(other),
    }
}
