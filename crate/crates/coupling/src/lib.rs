//! Couplings of a boundary node with a second node or with a finite-dimensional
//! linear system.
//!
//! A coupled operator keeps the column layout `[state₁ | state₂ | aux₁ | aux₂]`;
//! its square system is the evolution rows followed by the constraint rows.

mod composed;
mod error;
mod generator;
mod operator;
mod system;

pub use composed::{coupled_resolvent_composed, spectral_test, ComposedResolventParts, SpectralTest};
pub use error::CouplingError;
pub use generator::{coupled_resolvent_direct, ClosedNode, ConstrainedOperator, ResolventSolver};
pub use operator::{
    assemble_coupled, assemble_system_coupled, CoupledOperator, CouplingKind, Layout, Partner, DISSIPATIVITY_TOL,
};
pub use system::LinearSystemBlock;

pub type Result<T> = std::result::Result<T, CouplingError>;
