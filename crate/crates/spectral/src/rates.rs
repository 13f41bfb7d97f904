use bcs_numerics::{power_law_fit, PowerLawFit, RateFunction, RateTag};
use serde::{Deserialize, Serialize};

use crate::error::table_error;
use crate::scan::ScanResult;
use crate::{Result, SpectralError};

/// Rows needed by `fit_resolvent_growth`.
pub const MIN_GROWTH_ROWS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub alpha: f64,
    pub amplitude: f64,
    pub residual: f64,
}

/// Power-law fit of `res_norm` against `s` over the unflagged rows with `s ≥ s_min_fit`.
pub fn fit_resolvent_growth(scan: &ScanResult, s_min_fit: f64) -> Result<GrowthFit> {
    let pts: Vec<(f64, f64)> = scan
        .rows
        .iter()
        .filter(|r| r.s >= s_min_fit && r.s > 0.0 && r.res_norm.is_finite() && r.res_norm > 0.0)
        .map(|r| (r.s, r.res_norm))
        .collect();
    fit_growth_points(&pts)
}

pub fn fit_growth_points(pts: &[(f64, f64)]) -> Result<GrowthFit> {
    if pts.len() < MIN_GROWTH_ROWS {
        return Err(SpectralError::TooFewPoints { needed: MIN_GROWTH_ROWS, got: pts.len() });
    }
    let PowerLawFit { exponent, amplitude, residual } = power_law_fit(pts)?;
    Ok(GrowthFit { alpha: exponent, amplitude, residual })
}

/// The decay profile `t ↦ 1/M^{-1}(t)` and, for power-law `M`, its exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayPrediction {
    pub profile: Vec<(f64, f64)>,
    /// `‖T(t)z₀‖ ~ t^{-orbit_exponent}`.
    pub orbit_exponent: Option<f64>,
    /// `E(t) ~ t^{-energy_exponent}`.
    pub energy_exponent: Option<f64>,
}

/// Growth exponent of a rate `M(s) ~ s^α`.
fn growth_exponent(tag: Option<RateTag>) -> Option<f64> {
    match tag? {
        RateTag::OnePlusPower { alpha } => Some(alpha),
        RateTag::Power { exponent } => Some(exponent),
    }
}

pub fn predict_decay(m: &RateFunction, t: &[f64]) -> Result<DecayPrediction> {
    if !m.is_nondecreasing() {
        return Err(SpectralError::NotNondecreasing);
    }
    let profile = t
        .iter()
        .map(|&t| Ok((t, 1.0 / m.monotone_inverse(t).map_err(table_error)?)))
        .collect::<Result<Vec<_>>>()?;
    let orbit = growth_exponent(m.tag()).filter(|a| *a > 0.0).map(|a| 1.0 / a);
    Ok(DecayPrediction { profile, orbit_exponent: orbit, energy_exponent: orbit.map(|k| 2.0 * k) })
}

/// Decay exponent `k` of a rate tagged as `t^{-k}`.
pub fn decay_exponent(r: &RateFunction) -> Option<f64> {
    match r.tag()? {
        RateTag::Power { exponent } => Some(-exponent),
        RateTag::OnePlusPower { .. } => None,
    }
}

/// Least-squares decay exponent of a tabulated rate, read from its samples.
pub fn fitted_decay_exponent(r: &RateFunction) -> Result<f64> {
    Ok(-power_law_fit(r.samples())?.exponent)
}

/// `r` inverse to `s ↦ s^{-1/4} r₀^{-1}(s)`.
pub fn network_rate(r0: &RateFunction) -> Result<RateFunction> {
    if !r0.is_strictly_decreasing() {
        return Err(SpectralError::NotDecreasing);
    }
    // (s, r₀^{-1}(s)) at s = r₀(t_i), then (f(s), s)
    let mut pairs: Vec<(f64, f64)> = r0.samples().iter().map(|&(t, s)| (s.powf(-0.25) * t, s)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tag = r0.tag().and_then(|tag| match tag {
        RateTag::Power { exponent } if exponent < 0.0 => {
            let a = -exponent;
            Some(RateTag::Power { exponent: -network_exponent(a) })
        }
        _ => None,
    });
    Ok(RateFunction::new(pairs, tag)?)
}

/// `r` inverse to `s ↦ s^{-1} M₀(s^{-1/2})`.
pub fn acoustic_rate(m0: &RateFunction) -> Result<RateFunction> {
    if !m0.is_nondecreasing() {
        return Err(SpectralError::NotNondecreasing);
    }
    // σ = s^{-1/2}, so f = σ² M₀(σ) at s = σ^{-2}
    let pairs: Vec<(f64, f64)> =
        m0.samples().iter().filter(|p| p.0 > 0.0).map(|&(sigma, m)| (sigma * sigma * m, sigma.powi(-2))).collect();
    let tag = growth_exponent(m0.tag()).filter(|a| *a >= 0.0).map(|a| RateTag::Power { exponent: -acoustic_exponent(a) });
    Ok(RateFunction::new(pairs, tag)?)
}

/// `r₀(t) = t^{-α}` gives `r(t) = t^{-4α/(4+α)}`.
pub fn network_exponent(alpha: f64) -> f64 {
    4.0 * alpha / (4.0 + alpha)
}

/// `M₀(s) ~ s^α` gives energy decay `t^{-2/(2+α)}`.
pub fn acoustic_exponent(alpha: f64) -> f64 {
    2.0 / (2.0 + alpha)
}

/// Energy exponent for `M(s) = 1 + s^α`.
pub fn direct_energy_exponent(alpha: f64) -> f64 {
    2.0 / alpha
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMap {
    Direct,
    Network,
    Acoustic,
}

impl RateMap {
    /// Energy decay exponent for the power-law input `α`.
    pub fn energy_exponent(self, alpha: f64) -> f64 {
        match self {
            RateMap::Direct => direct_energy_exponent(alpha),
            RateMap::Network => network_exponent(alpha),
            RateMap::Acoustic => acoustic_exponent(alpha),
        }
    }
}
