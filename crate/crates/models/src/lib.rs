//! Builders for the bundled boundary models.
//!
//! Waves are reduced to first order with `u = y_x` and `v = y_t`. Velocities
//! live at grid nodes, strains at cell centres, and the two end strains are
//! auxiliary columns, so that the discrete energy balance holds exactly.

mod acoustic;
mod error;
mod heat;
mod instance;
mod sbp;
mod star;
mod wave;

pub use acoustic::{
    acoustic_lower_bound, acoustic_transfer_exact, build_acoustic_block, build_acoustic_surrogate, build_ray_node,
    AcousticParams,
};
pub use error::ModelError;
pub use heat::{build_heat_node, heat_transfer_exact, re_heat_transfer_exact};
pub use instance::{build_wave_heat, FeedbackConfig, Field, ModelConfig, ModelInstance, ModelKind, WaveHeatParams, SMOOTH_MODES};
pub use sbp::{sbp_first_derivative, SbpOperators};
pub use star::{build_star_network, build_star_node, StarParams};
pub use wave::{build_interval_wave, build_reflective_wave, build_wave_node, LeftEnd, WaveGrid, MASS_BLEND};

pub type Result<T> = std::result::Result<T, ModelError>;
