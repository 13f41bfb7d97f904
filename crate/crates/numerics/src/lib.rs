//! Dense complex linear algebra shared by every other crate in the workspace.
//!
//! Matrices are `faer::Mat<Complex64>`. Every Hilbert-space norm is routed
//! through a [`HermitianGram`] and its cached triangular factor.

pub mod error;
pub mod fit;
pub mod gram;
pub mod json;
pub mod linalg;
pub mod random;
pub mod rate;

pub use error::NumericsError;
pub use fit::{power_law_fit, PowerLawFit};
pub use gram::{hermitian_min_eig, weighted_operator_norm, HermitianGram};
pub use linalg::{
    eigenvalues, smallest_singular_value, solve_linear, spectral_norm, CMat, Lu, C64,
    SINGULAR_PIVOT_RTOL,
};
pub use rate::{RateFunction, RateTag};

pub type Result<T> = std::result::Result<T, NumericsError>;
