use bcs_coupling::ConstrainedOperator;
use bcs_numerics::linalg::{CMat, C64};
use bcs_numerics::{power_law_fit, PowerLawFit};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::stepper::CayleyStepper;
use crate::{Result, SemigroupError};

pub const CSV_HEADER: &str = "t,E,E_block1,E_block2";
/// Energies at or below this are excluded from decay fits.
pub const NOISE_FLOOR: f64 = 1e-13;
pub const MIN_FIT_SAMPLES: usize = 10;

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub dt: f64,
    pub t_max: f64,
    #[serde(default = "one")]
    pub record_stride: usize,
    #[serde(default = "two")]
    pub smoothing_order: usize,
}

impl TrajectoryConfig {
    pub fn new(dt: f64, t_max: f64) -> Self {
        Self { dt, t_max, record_stride: 1, smoothing_order: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SemigroupError::InvalidConfig(format!("dt must be positive and finite, got {}", self.dt)));
        }
        if !(self.t_max >= self.dt && self.t_max.is_finite()) {
            return Err(SemigroupError::InvalidConfig(format!("t_max = {} is below dt = {}", self.t_max, self.dt)));
        }
        if self.record_stride == 0 {
            return Err(SemigroupError::InvalidConfig("record_stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t_max / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub e: f64,
    /// Energies of the operator's state blocks.
    pub blocks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyCurve {
    pub samples: Vec<EnergySample>,
    pub steps: usize,
    /// `max (E_{n+1} - E_n)/E_n` over every step, floored at 0.
    pub max_rel_increase: f64,
    /// Final state.
    #[serde(skip)]
    pub state: Vec<C64>,
}

impl EnergyCurve {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t, s.e)).collect()
    }

    /// `max |ΣE_b - E| / E` over the samples with `E > 0`.
    pub fn split_defect(&self) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.e > 0.0)
            .map(|s| (s.blocks.iter().sum::<f64>() - s.e).abs() / s.e)
            .fold(0.0, f64::max)
    }

    pub fn is_nonincreasing(&self, rtol: f64) -> bool {
        self.max_rel_increase <= rtol
    }

    pub fn to_csv(&self) -> Result<String> {
        let width = self.samples.iter().map(|s| s.blocks.len()).max().unwrap_or(0).max(2);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = CSV_HEADER.split(',').map(String::from).collect();
        header.extend((3..=width).map(|k| format!("E_block{k}")));
        w.write_record(&header).map_err(csv_error)?;
        for s in &self.samples {
            let mut rec = vec![format!("{:.16e}", s.t), format!("{:.16e}", s.e)];
            rec.extend((0..width).map(|k| format!("{:.16e}", s.blocks.get(k).copied().unwrap_or(0.0))));
            w.write_record(&rec).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| SemigroupError::Csv(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| SemigroupError::Csv(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> SemigroupError {
    SemigroupError::Csv(e.to_string())
}

impl CayleyStepper {
    fn sample(&self, t: f64, y: &CMat) -> EnergySample {
        let blocks = self
            .blocks()
            .iter()
            .map(|b| 0.5 * b.clone().map(|i| y[(i, 0)].norm_sqr()).sum::<f64>())
            .collect();
        EnergySample { t, e: half_norm_sq(y), blocks }
    }

    /// Repeated steps from `z0`; energies every `record_stride` steps and at the end.
    pub fn simulate(&self, z0: &[C64], cfg: &TrajectoryConfig) -> Result<EnergyCurve> {
        cfg.validate()?;
        if cfg.dt != self.dt() {
            return Err(SemigroupError::InvalidConfig(format!("stepper built for dt = {}, config has {}", self.dt(), cfg.dt)));
        }
        let steps = cfg.steps();
        let mut y = self.to_orthonormal(z0)?;
        let mut e = half_norm_sq(&y);
        let mut samples = vec![self.sample(0.0, &y)];
        let mut max_rel = 0.0f64;
        for k in 1..=steps {
            y = self.step_y(&y);
            let next = half_norm_sq(&y);
            if next > e {
                max_rel = max_rel.max(if e > 0.0 { (next - e) / e } else { f64::INFINITY });
            }
            e = next;
            if k % cfg.record_stride == 0 || k == steps {
                samples.push(self.sample(k as f64 * cfg.dt, &y));
            }
        }
        Ok(EnergyCurve { samples, steps, max_rel_increase: max_rel, state: self.state_of(&y) })
    }
}

fn half_norm_sq(y: &CMat) -> f64 {
    0.5 * (0..y.nrows()).map(|i| y[(i, 0)].norm_sqr()).sum::<f64>()
}

pub fn simulate_energy<O: ConstrainedOperator + ?Sized>(op: &O, z0: &[C64], cfg: &TrajectoryConfig) -> Result<EnergyCurve> {
    cfg.validate()?;
    CayleyStepper::new(op, cfg.dt)?.simulate(z0, cfg)
}

/// Independent trajectories sharing one stepper.
pub fn simulate_many<O: ConstrainedOperator + ?Sized>(
    op: &O,
    data: &[Vec<C64>],
    cfg: &TrajectoryConfig,
) -> Result<Vec<EnergyCurve>> {
    cfg.validate()?;
    let stepper = CayleyStepper::new(op, cfg.dt)?;
    data.par_iter().map(|z0| stepper.simulate(z0, cfg)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `E(t) ~ t^{-beta}`.
    pub beta: f64,
    pub residual: f64,
    pub points: usize,
}

/// The last decade of simulated time.
pub fn default_window(curve: &EnergyCurve) -> (f64, f64) {
    let end = curve.samples.last().map_or(0.0, |s| s.t);
    (end / 10.0, end)
}

pub fn fit_decay(curve: &EnergyCurve, window: (f64, f64)) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = curve
        .samples
        .iter()
        .filter(|s| s.t >= window.0 && s.t <= window.1 && s.t > 0.0 && s.e > NOISE_FLOOR)
        .map(|s| (s.t, s.e))
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(SemigroupError::WindowBelowNoiseFloor { needed: MIN_FIT_SAMPLES, got: pts.len() });
    }
    let PowerLawFit { exponent, residual, .. } = power_law_fit(&pts)?;
    Ok(DecayFit { beta: -exponent, residual, points: pts.len() })
}
