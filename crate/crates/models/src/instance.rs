use bcs_coupling::{assemble_coupled, assemble_system_coupled, ClosedNode, CoupledOperator};
use bcs_node::feedback_boundary;
use bcs_numerics::linalg::{self, C64};
use bcs_numerics::random::{real_normal_vec, seeded_rng};
use serde::{Deserialize, Serialize};

use crate::acoustic::{build_acoustic_block, build_ray_node, AcousticParams};
use crate::error::invalid;
use crate::heat::build_heat_node;
use crate::star::{build_star_node, StarParams};
use crate::wave::build_wave_node;
use crate::{ModelError, Result};

/// Sine modes per smooth field in `smooth_state`.
pub const SMOOTH_MODES: usize = 8;

/// Wave on `(-1, 0)` and heat on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveHeatParams {
    pub n_wave: usize,
    pub n_heat: usize,
}

impl WaveHeatParams {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n_wave", self.n_wave), ("n_heat", self.n_heat)] {
            if n < 8 {
                return Err(invalid(name, format!("need at least 8 cells, got {n}")));
            }
        }
        Ok(())
    }

    pub fn fields(&self) -> Vec<Field> {
        let (nw, nh) = (self.n_wave, self.n_heat);
        vec![
            Field::smooth("v", 0, (0..=nw).map(|i| i as f64 / nw as f64).collect()),
            Field::smooth("u", nw + 1, (0..nw).map(|i| (i as f64 + 0.5) / nw as f64).collect()),
            Field::smooth("w", 2 * nw + 1, (0..nh).map(|i| (i as f64 + 0.5) / nh as f64).collect()),
        ]
    }
}

/// Wave and heat coupled through `v(0) = w(0)`, `u(0) = w'(0)`, with `J = Q = 1`.
pub fn build_wave_heat(params: &WaveHeatParams) -> Result<CoupledOperator> {
    params.validate()?;
    let op = assemble_coupled(build_wave_node(params.n_wave)?, build_heat_node(params.n_heat)?, linalg::identity(1))?;
    Ok(op.with_q(linalg::identity(1))?)
}

/// A contiguous run of state coordinates sampled at positions `xi` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field {
    pub name: String,
    pub start: usize,
    pub xi: Vec<f64>,
    /// Smooth fields get sine modes; the others get independent normals.
    pub smooth: bool,
    /// Shifted to zero mean after sampling.
    pub centered: bool,
}

impl Field {
    pub fn smooth(name: impl Into<String>, start: usize, xi: Vec<f64>) -> Self {
        Self { name: name.into(), start, xi, smooth: true, centered: false }
    }
    pub fn random(name: impl Into<String>, start: usize, len: usize) -> Self {
        Self { name: name.into(), start, xi: vec![0.0; len], smooth: false, centered: false }
    }
    pub fn centered(mut self) -> Self {
        self.centered = true;
        self
    }
    pub fn len(&self) -> usize {
        self.xi.len()
    }
    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params")]
pub enum ModelKind {
    #[serde(rename = "wave_heat_1d")]
    WaveHeat1d(WaveHeatParams),
    #[serde(rename = "wave_heat_star")]
    WaveHeatStar(StarParams),
    #[serde(rename = "acoustic_surrogate")]
    AcousticSurrogate(AcousticParams),
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::WaveHeat1d(_) => "wave_heat_1d",
            ModelKind::WaveHeatStar(_) => "wave_heat_star",
            ModelKind::AcousticSurrogate(_) => "acoustic_surrogate",
        }
    }
}

/// `J = j·I` and `Q = q·I` on the partner ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackConfig {
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default = "one")]
    pub q: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        Self { j: 1.0, q: 1.0 }
    }
}

/// `{"model": …, "params": {…}, "feedback": {"j", "q"}, "simulate": {…}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(flatten)]
    pub model: ModelKind,
    #[serde(default)]
    pub feedback: FeedbackConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<serde_json::Value>,
}

impl ModelConfig {
    pub fn new(model: ModelKind) -> Self {
        Self { model, feedback: FeedbackConfig::default(), simulate: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ModelError::Config(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// A built model with its state layout.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    pub config: ModelConfig,
    pub operator: CoupledOperator,
    pub fields: Vec<Field>,
}

impl ModelInstance {
    pub fn build(config: ModelConfig) -> Result<Self> {
        let fb = config.feedback;
        if !fb.j.is_finite() || !fb.q.is_finite() {
            return Err(invalid("feedback", "j and q must be finite"));
        }
        let scaled = |m: usize, a: f64| linalg::scale(&linalg::identity(m), C64::new(a, 0.0));
        let (operator, fields) = match &config.model {
            ModelKind::WaveHeat1d(p) => {
                p.validate()?;
                let op = assemble_coupled(build_wave_node(p.n_wave)?, build_heat_node(p.n_heat)?, scaled(1, fb.j))?;
                (op.with_q(scaled(1, fb.q))?, p.fields())
            }
            ModelKind::WaveHeatStar(p) => {
                let op = assemble_coupled(build_star_node(p)?, build_heat_node(p.n_heat)?, scaled(1, fb.j))?;
                (op.with_q(scaled(1, fb.q))?, p.fields())
            }
            ModelKind::AcousticSurrogate(p) => {
                let m = p.n_gamma;
                let op = assemble_system_coupled(build_ray_node(p)?, build_acoustic_block(p)?, scaled(m, fb.j))?;
                (op.with_q(scaled(m, fb.q))?, p.fields())
            }
        };
        Ok(Self { config, operator, fields })
    }

    pub fn name(&self) -> &'static str {
        self.config.model.name()
    }

    /// `A₀`: the first node with boundary `G₁ + J^*QJK₁`.
    pub fn reference_node(&self) -> Result<ClosedNode> {
        let node = self.operator.node1();
        let b = feedback_boundary(node, self.operator.feedback())?;
        Ok(ClosedNode::new(node.clone(), b)?)
    }

    /// Seeded state: sums of `sin((j+1)πξ)` with normal coefficients on smooth fields.
    pub fn smooth_state(&self, seed: u64) -> Vec<C64> {
        let mut rng = seeded_rng(seed);
        let mut out = vec![C64::new(0.0, 0.0); self.operator.n_state()];
        for f in &self.fields {
            if f.smooth {
                let coef = real_normal_vec(&mut rng, SMOOTH_MODES);
                for (i, &x) in f.xi.iter().enumerate() {
                    let v: f64 = coef
                        .iter()
                        .enumerate()
                        .map(|(j, c)| c * ((j + 1) as f64 * std::f64::consts::PI * x).sin())
                        .sum();
                    out[f.start + i] = C64::new(v, 0.0);
                }
            } else {
                for (i, v) in real_normal_vec(&mut rng, f.len()).into_iter().enumerate() {
                    out[f.start + i] = C64::new(v, 0.0);
                }
            }
            if f.centered && !f.is_empty() {
                let block = &mut out[f.start..f.start + f.len()];
                let mean = block.iter().sum::<C64>() / f.len() as f64;
                block.iter_mut().for_each(|v| *v -= mean);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::StarParams;

    #[test]
    fn fields_tile_the_state() {
        for cfg in [
            ModelKind::WaveHeat1d(WaveHeatParams { n_wave: 10, n_heat: 9 }),
            ModelKind::WaveHeatStar(StarParams::golden(2, 12, 10)),
            ModelKind::AcousticSurrogate(AcousticParams::uniform(3, 1.0, 1.0, 1.0, 8)),
        ] {
            let inst = ModelInstance::build(ModelConfig::new(cfg)).unwrap();
            let mut next = 0;
            for f in &inst.fields {
                assert_eq!(f.start, next, "{}", f.name);
                next += f.len();
            }
            assert_eq!(next, inst.operator.n_state());
        }
    }

    #[test]
    fn config_json() {
        let text = r#"{"model": "wave_heat_1d", "params": {"n_wave": 12, "n_heat": 10}, "feedback": {"j": 1, "q": 2}}"#;
        let cfg = ModelConfig::from_json(text).unwrap();
        assert_eq!(cfg.model, ModelKind::WaveHeat1d(WaveHeatParams { n_wave: 12, n_heat: 10 }));
        assert_eq!(cfg.feedback.q, 2.0);
        assert_eq!(ModelConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn config_errors() {
        let err = ModelConfig::from_json("{\"model\": \"wave_heat_1d\", \"params\": {\"n_wave\": 12").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        let neg = r#"{"model": "wave_heat_1d", "params": {"n_wave": 12, "n_heat": 10}, "feedback": {"q": -0.1}}"#;
        assert!(ModelInstance::build(ModelConfig::from_json(neg).unwrap()).is_err());
        let star = r#"{"model": "wave_heat_star", "params": {"N": 1, "lengths": [1, 1], "n_edge": [10, 10], "n_heat": 10}}"#;
        assert!(ModelInstance::build(ModelConfig::from_json(star).unwrap()).is_ok());
    }

    #[test]
    fn star_strains_are_centred_off_the_port_edge() {
        let inst = ModelInstance::build(ModelConfig::new(ModelKind::WaveHeatStar(StarParams::golden(2, 12, 10)))).unwrap();
        let z = inst.smooth_state(5);
        for f in &inst.fields {
            let sum: C64 = z[f.start..f.start + f.len()].iter().sum();
            assert_eq!(f.centered, f.name == "u1" || f.name == "u2", "{}", f.name);
            if f.centered {
                assert!(sum.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn smooth_state_is_seeded() {
        let inst = ModelInstance::build(ModelConfig::new(ModelKind::WaveHeat1d(WaveHeatParams { n_wave: 10, n_heat: 10 })))
            .unwrap();
        assert_eq!(inst.smooth_state(3), inst.smooth_state(3));
        assert_ne!(inst.smooth_state(3), inst.smooth_state(4));
    }
}
