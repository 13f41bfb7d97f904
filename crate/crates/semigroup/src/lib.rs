//! Cayley time stepping for constrained generators.
//!
//! A step solves the constrained system at `λ = 2/dt`, so every iterate satisfies the
//! coupling and essential constraints exactly and the energy `½‖z‖²` never grows beyond
//! rounding. Classical data come from repeated constrained solves.

pub mod data;
pub mod energy;
pub mod error;
pub mod stepper;

pub use data::{apply_generator, classical_data, constraint_residual, ClassicalData, CONSTRAINT_TOL, FALLBACK_PROBE};
pub use energy::{
    default_window, fit_decay, simulate_energy, simulate_many, DecayFit, EnergyCurve, EnergySample, TrajectoryConfig,
    CSV_HEADER, MIN_FIT_SAMPLES, NOISE_FLOOR,
};
pub use error::SemigroupError;
pub use stepper::{energy, step_cayley, CayleyStepper};

pub type Result<T> = std::result::Result<T, SemigroupError>;
