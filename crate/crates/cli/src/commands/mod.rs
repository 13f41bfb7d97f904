mod fit;
mod predict;
mod scan;
mod simulate;
mod verify;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use bcs_models::{ModelConfig, ModelInstance};

pub use fit::{fit, fit_table, FitOutput};
pub use predict::{predict_rate, Prediction};
pub use scan::scan;
pub use simulate::{initial_state, simulate};
pub use verify::{verify, verify_model, Check, VerifyReport};

use crate::manifest::sha256_hex;

/// A parsed model config with its digest.
pub struct Loaded {
    pub instance: ModelInstance,
    pub digest: String,
}

pub fn load_config(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = ModelConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    let digest = sha256_hex(config.to_json().as_bytes());
    let instance = ModelInstance::build(config).with_context(|| format!("building model from {}", path.display()))?;
    Ok(Loaded { instance, digest })
}
