use serde::{Deserialize, Serialize};

use crate::{NumericsError, Result};

/// Closed form attached to a tabulated rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateTag {
    /// `M(s) = 1 + s^alpha`.
    OnePlusPower { alpha: f64 },
    /// `f(s) = s^exponent`.
    Power { exponent: f64 },
}

/// Tabulated function `s -> M(s) > 0` on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    samples: Vec<(f64, f64)>,
    tag: Option<RateTag>,
}

impl RateFunction {
    pub fn new(samples: Vec<(f64, f64)>, tag: Option<RateTag>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(NumericsError::TooFewPoints { needed: 2, got: samples.len() });
        }
        for &(s, m) in &samples {
            if !s.is_finite() || !m.is_finite() || !(m > 0.0) {
                return Err(NumericsError::InvalidData(format!("bad sample ({s}, {m})")));
            }
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(NumericsError::InvalidData("abscissae must be strictly increasing".into()));
        }
        Ok(Self { samples, tag })
    }

    pub fn tabulate(f: impl Fn(f64) -> f64, s: &[f64], tag: Option<RateTag>) -> Result<Self> {
        Self::new(s.iter().map(|&x| (x, f(x))).collect(), tag)
    }

    /// `1 + s^alpha` on `points` samples of `[0, s_max]`.
    pub fn one_plus_power(alpha: f64, s_max: f64, points: usize) -> Result<Self> {
        let grid: Vec<f64> = (0..points).map(|i| s_max * i as f64 / (points - 1) as f64).collect();
        Self::tabulate(|s| 1.0 + s.powf(alpha), &grid, Some(RateTag::OnePlusPower { alpha }))
    }

    /// `s^exponent` on a logarithmic grid of `[s_min, s_max]`.
    pub fn power(exponent: f64, s_min: f64, s_max: f64, points: usize) -> Result<Self> {
        let (a, b) = (s_min.ln(), s_max.ln());
        let grid: Vec<f64> = (0..points)
            .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
            .collect();
        Self::tabulate(|s| s.powf(exponent), &grid, Some(RateTag::Power { exponent }))
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn tag(&self) -> Option<RateTag> {
        self.tag
    }

    pub fn with_tag(mut self, tag: Option<RateTag>) -> Self {
        self.tag = tag;
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 >= w[0].1)
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 < w[0].1)
    }

    /// Piecewise-linear evaluation inside the table.
    pub fn eval(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(s >= lo && s <= hi) {
            return Err(NumericsError::OutOfRange { value: s, min: lo, max: hi });
        }
        let i = self.samples.partition_point(|p| p.0 <= s);
        if i == self.samples.len() {
            return Ok(self.samples[i - 1].1);
        }
        let (s0, m0) = self.samples[i - 1];
        let (s1, m1) = self.samples[i];
        Ok(m0 + (m1 - m0) * (s - s0) / (s1 - s0))
    }

    /// Largest `s` in the table with `M(s) <= t` (maximal right-inverse), linear between samples.
    pub fn monotone_inverse(&self, t: f64) -> Result<f64> {
        if !self.is_nondecreasing() {
            return Err(NumericsError::InvalidData("rate function is not nondecreasing".into()));
        }
        let first = self.samples[0].1;
        let last = self.samples[self.samples.len() - 1].1;
        if !(t >= first && t <= last) {
            return Err(NumericsError::OutOfRange { value: t, min: first, max: last });
        }
        let i = self.samples.partition_point(|p| p.1 <= t) - 1;
        if i + 1 == self.samples.len() {
            return Ok(self.samples[i].0);
        }
        let (s0, m0) = self.samples[i];
        let (s1, m1) = self.samples[i + 1];
        Ok(s0 + (t - m0) / (m1 - m0) * (s1 - s0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded_rng;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn linear_inverse() {
        let m = RateFunction::one_plus_power(1.0, 10.0, 11).unwrap();
        assert!((m.monotone_inverse(5.0).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn square_root_inverse() {
        let m = RateFunction::one_plus_power(0.5, 100.0, 101).unwrap();
        assert!((m.monotone_inverse(3.0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range() {
        let m = RateFunction::one_plus_power(1.0, 10.0, 11).unwrap();
        assert!(matches!(m.monotone_inverse(0.5), Err(NumericsError::OutOfRange { .. })));
        assert!(matches!(m.monotone_inverse(12.0), Err(NumericsError::OutOfRange { .. })));
    }

    #[test]
    fn plateau_returns_largest_preimage() {
        let m = RateFunction::new(vec![(0.0, 1.0), (1.0, 2.0), (2.0, 2.0), (3.0, 3.0)], None).unwrap();
        assert_eq!(m.monotone_inverse(2.0).unwrap(), 2.0);
    }

    #[test]
    fn sandwich_on_random_table() {
        let mut rng = seeded_rng(17);
        let mut s = 0.0;
        let mut v = 1.0;
        let mut samples = Vec::new();
        for _ in 0..50 {
            samples.push((s, v));
            s += rng.random_range(0.1..1.0);
            v += rng.random_range(0.0..2.0);
        }
        let m = RateFunction::new(samples.clone(), None).unwrap();
        let (lo, hi) = (samples[0].1, samples[samples.len() - 1].1);
        for _ in 0..100 {
            let t = rng.random_range(lo..hi);
            let x = m.monotone_inverse(t).unwrap();
            assert!(m.eval(x).unwrap() <= t + 1e-12);
            let next = samples.iter().find(|p| p.0 > x).map_or(hi, |p| p.1);
            assert!(t <= next + 1e-12);
        }
    }

    #[test]
    fn rejects_unsorted() {
        assert!(RateFunction::new(vec![(1.0, 1.0), (0.5, 2.0)], None).is_err());
    }

    proptest! {
        #[test]
        fn inverse_is_nondecreasing(alpha in 0.1f64..3.0, t1 in 1.0f64..50.0, dt in 0.0f64..50.0) {
            let m = RateFunction::one_plus_power(alpha, 1000.0, 400).unwrap();
            let t2 = t1 + dt;
            if let (Ok(a), Ok(b)) = (m.monotone_inverse(t1), m.monotone_inverse(t2)) {
                prop_assert!(a <= b);
            }
        }
    }
}
