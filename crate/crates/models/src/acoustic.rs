use bcs_coupling::{assemble_system_coupled, CoupledOperator, LinearSystemBlock};
use bcs_node::{DiscreteBoundaryNode, NodeParts};
use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::HermitianGram;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::instance::Field;
use crate::wave::WaveGrid;
use crate::{ModelError, Result};

/// Oscillator coefficients at `n_gamma` boundary points with quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcousticParams {
    pub n_gamma: usize,
    pub m: Vec<f64>,
    pub d: Vec<f64>,
    pub k: Vec<f64>,
    /// Recorded lower bounds; the pointwise minima when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    pub weights: Vec<f64>,
    /// Cells of each surrogate wave ray.
    pub n_wave: usize,
}

/// `(lower bound, sup)` of one coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBounds {
    pub lower: f64,
    pub sup: f64,
}

impl AcousticParams {
    pub fn uniform(n_gamma: usize, m: f64, d: f64, k: f64, n_wave: usize) -> Self {
        Self {
            n_gamma,
            m: vec![m; n_gamma],
            d: vec![d; n_gamma],
            k: vec![k; n_gamma],
            m0: None,
            d0: None,
            k0: None,
            weights: vec![1.0 / n_gamma as f64; n_gamma],
            n_wave,
        }
    }

    fn bounds_of(name: &str, values: &[f64], recorded: Option<f64>) -> Result<CoefficientBounds> {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let sup = values.iter().copied().fold(0.0, f64::max);
        let lower = recorded.unwrap_or(min);
        if !(lower > 0.0) || !lower.is_finite() {
            return Err(ModelError::CoefficientBoundViolation(format!("{name}0 = {lower} must be positive")));
        }
        if min < lower {
            return Err(ModelError::CoefficientBoundViolation(format!("{name} takes value {min} < {name}0 = {lower}")));
        }
        if !sup.is_finite() {
            return Err(ModelError::CoefficientBoundViolation(format!("{name} is not finite")));
        }
        Ok(CoefficientBounds { lower, sup })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_gamma == 0 {
            return Err(invalid("n_gamma", "need at least one boundary point"));
        }
        for (name, v) in [("m", &self.m), ("d", &self.d), ("k", &self.k), ("weights", &self.weights)] {
            if v.len() != self.n_gamma {
                return Err(invalid(name, format!("expected {} entries, got {}", self.n_gamma, v.len())));
            }
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(invalid("weights", format!("must be positive, got {w}")));
        }
        if self.n_wave < 8 {
            return Err(invalid("n_wave", format!("need at least 8 cells, got {}", self.n_wave)));
        }
        self.bounds()?;
        Ok(())
    }

    /// Bounds for `m`, `d`, `k`.
    pub fn bounds(&self) -> Result<[CoefficientBounds; 3]> {
        Ok([
            Self::bounds_of("m", &self.m, self.m0)?,
            Self::bounds_of("d", &self.d, self.d0)?,
            Self::bounds_of("k", &self.k, self.k0)?,
        ])
    }

    pub fn fields(&self) -> Vec<Field> {
        let cells = self.n_wave;
        let mut out = Vec::new();
        let mut start = 0;
        for r in 0..self.n_gamma {
            out.push(Field::smooth(format!("v{r}"), start, (0..=cells).map(|i| i as f64 / cells as f64).collect()));
            start += cells + 1;
            out.push(Field::smooth(format!("u{r}"), start, (0..cells).map(|i| (i as f64 + 0.5) / cells as f64).collect()));
            start += cells;
        }
        out.push(Field::random("pq", start, 2 * self.n_gamma));
        out
    }
}

/// `n_gamma` rays on `(0, 1)` with `v(0) = 0`, input `u(1)` and output `v(1)` per ray.
pub fn build_ray_node(params: &AcousticParams) -> Result<DiscreteBoundaryNode> {
    params.validate()?;
    let g = WaveGrid::new(params.n_wave, 1.0)?;
    let rays = params.n_gamma;
    let ns1 = g.n_state();
    let n_state = rays * ns1;
    let n = n_state + 2 * rays;
    let global = |r: usize, local: usize| if local < ns1 { r * ns1 + local } else { n_state + 2 * r + (local - ns1) };
    let mut l = linalg::zeros(n_state, n);
    let mut gram = linalg::zeros(n_state, n_state);
    let sel = |cols: Vec<usize>| -> CMat {
        let mut m = linalg::zeros(cols.len(), n);
        for (i, c) in cols.into_iter().enumerate() {
            m[(i, c)] = C64::new(1.0, 0.0);
        }
        m
    };
    for r in 0..rays {
        let w = params.weights[r];
        for i in 0..ns1 {
            for j in 0..ns1 + 2 {
                l[(r * ns1 + i, global(r, j))] = g.l[(i, j)];
            }
            for j in 0..ns1 {
                gram[(r * ns1 + i, r * ns1 + j)] = g.gram[(i, j)] * w;
            }
        }
    }
    Ok(DiscreteBoundaryNode::new(NodeParts {
        label: format!("rays x{rays}"),
        n_state,
        l,
        essential: sel((0..rays).map(|r| global(r, g.v(0))).collect()),
        g: sel((0..rays).map(|r| global(r, g.u_right())).collect()),
        k: sel((0..rays).map(|r| global(r, g.v(g.cells))).collect()),
        x_gram: HermitianGram::new(gram)?,
        u_gram: HermitianGram::diagonal(&params.weights)?,
    })?)
}

/// Per point `(p, q)` with `p' = q`, `m q' = -k p - d q + u`, output `q`.
pub fn build_acoustic_block(params: &AcousticParams) -> Result<LinearSystemBlock> {
    params.validate()?;
    let n = params.n_gamma;
    let mut a = linalg::zeros(2 * n, 2 * n);
    let mut b = linalg::zeros(2 * n, n);
    let mut c = linalg::zeros(n, 2 * n);
    let mut xw = Vec::with_capacity(2 * n);
    for i in 0..n {
        let (m, d, k, w) = (params.m[i], params.d[i], params.k[i], params.weights[i]);
        a[(2 * i, 2 * i + 1)] = C64::new(1.0, 0.0);
        a[(2 * i + 1, 2 * i)] = C64::new(-k / m, 0.0);
        a[(2 * i + 1, 2 * i + 1)] = C64::new(-d / m, 0.0);
        b[(2 * i + 1, i)] = C64::new(1.0 / m, 0.0);
        c[(i, 2 * i + 1)] = C64::new(1.0, 0.0);
        xw.push(k * w);
        xw.push(m * w);
    }
    Ok(LinearSystemBlock::new(
        a,
        b,
        c,
        linalg::zeros(n, n),
        HermitianGram::diagonal(&xw)?,
        HermitianGram::diagonal(&params.weights)?,
    )?)
}

/// `λ / (mλ² + dλ + k)`; at `λ = is` this is `s / (sd + i(s²m - k))`.
pub fn acoustic_transfer_exact(lambda: C64, m: f64, d: f64, k: f64) -> C64 {
    lambda / (m * lambda * lambda + d * lambda + k)
}

/// `s²d₀ / (s²‖d‖ + 2s⁴‖m‖² + 2‖k‖²)`.
pub fn acoustic_lower_bound(s: f64, d0: f64, d_sup: f64, m_sup: f64, k_sup: f64) -> f64 {
    let s2 = s * s;
    s2 * d0 / (s2 * d_sup + 2.0 * s2 * s2 * m_sup * m_sup + 2.0 * k_sup * k_sup)
}

/// Rays coupled to the oscillator block with `J = I`; `Q = I` for the reference node.
pub fn build_acoustic_surrogate(params: &AcousticParams) -> Result<CoupledOperator> {
    let node = build_ray_node(params)?;
    let block = build_acoustic_block(params)?;
    let id = linalg::identity(params.n_gamma);
    Ok(assemble_system_coupled(node, block, id.clone())?.with_q(id)?)
}
