use bcs_node::{DiscreteBoundaryNode, NodeParts};
use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::{HermitianGram, Lu};

use crate::error::invalid;
use crate::Result;

/// Weight of the consistent mass in the velocity mass matrix; the rest is lumped.
pub const MASS_BLEND: f64 = 0.5;

/// Which quantity vanishes at the left end of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeftEnd {
    /// `u = y_x = 0`.
    Strain,
    /// `v = y_t = 0`.
    Velocity,
}

/// One wave edge with `cells` cells. Local columns: `v_0..v_N`, `u_0..u_{N-1}`, `u_L`, `u_R`.
#[derive(Debug, Clone)]
pub struct WaveGrid {
    pub cells: usize,
    pub length: f64,
    /// Evolution rows, `(2N+1) × (2N+3)`.
    pub l: CMat,
    /// State Gram `blockdiag(M, hI)`.
    pub gram: CMat,
}

impl WaveGrid {
    pub fn new(cells: usize, length: f64) -> Result<Self> {
        if cells < 2 {
            return Err(invalid("cells", format!("need at least 2 cells, got {cells}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(invalid("length", format!("must be positive, got {length}")));
        }
        let n = cells;
        let h = length / n as f64;
        let ns = 2 * n + 1;
        let mass = linalg::from_real(n + 1, n + 1, |i, j| {
            let end = i == 0 || i == n;
            let lumped = if i == j { if end { h / 2.0 } else { h } } else { 0.0 };
            let consistent = if i == j {
                if end {
                    h / 3.0
                } else {
                    2.0 * h / 3.0
                }
            } else if i.abs_diff(j) == 1 {
                h / 6.0
            } else {
                0.0
            };
            (1.0 - MASS_BLEND) * lumped + MASS_BLEND * consistent
        });
        let (iul, iur) = (ns, ns + 1);
        let iu = |i: usize| n + 1 + i;
        let mut s = linalg::zeros(n + 1, ns + 2);
        for i in 0..=n {
            let left = if i == 0 { iul } else { iu(i - 1) };
            let right = if i == n { iur } else { iu(i) };
            s[(i, right)] += C64::new(1.0, 0.0);
            s[(i, left)] -= C64::new(1.0, 0.0);
        }
        let vrows = Lu::factor(&mass)?.solve(&s);
        let mut l = linalg::zeros(ns, ns + 2);
        l.as_mut().submatrix_mut(0, 0, n + 1, ns + 2).copy_from(vrows.as_ref());
        for i in 0..n {
            l[(iu(i), i + 1)] += C64::new(1.0 / h, 0.0);
            l[(iu(i), i)] -= C64::new(1.0 / h, 0.0);
        }
        let gram = linalg::block_diag(&[&mass, &linalg::diag_real(&vec![h; n])]);
        Ok(Self { cells, length, l, gram })
    }

    pub fn h(&self) -> f64 {
        self.length / self.cells as f64
    }
    pub fn n_state(&self) -> usize {
        2 * self.cells + 1
    }
    pub fn v(&self, i: usize) -> usize {
        i
    }
    pub fn u(&self, i: usize) -> usize {
        self.cells + 1 + i
    }
    pub fn u_left(&self) -> usize {
        self.n_state()
    }
    pub fn u_right(&self) -> usize {
        self.n_state() + 1
    }
    /// Positions in `[0, 1]` of the state coordinates: nodes for `v`, centres for `u`.
    pub fn v_positions(&self) -> Vec<f64> {
        (0..=self.cells).map(|i| i as f64 / self.cells as f64).collect()
    }
    pub fn u_positions(&self) -> Vec<f64> {
        (0..self.cells).map(|i| (i as f64 + 0.5) / self.cells as f64).collect()
    }

    /// Row selecting one local column.
    pub fn unit_row(&self, col: usize) -> CMat {
        linalg::from_real(1, self.n_state() + 2, |_, j| if j == col { 1.0 } else { 0.0 })
    }
}

/// Wave on an interval with input `v` and output `u` at the right end.
pub fn build_interval_wave(
    cells: usize,
    length: f64,
    left: LeftEnd,
    port_weight: f64,
    label: &str,
) -> Result<DiscreteBoundaryNode> {
    if !(port_weight > 0.0) {
        return Err(invalid("port_weight", "must be positive"));
    }
    let g = WaveGrid::new(cells, length)?;
    let essential = match left {
        LeftEnd::Strain => g.unit_row(g.u_left()),
        LeftEnd::Velocity => g.unit_row(g.v(0)),
    };
    let x_gram = HermitianGram::new(linalg::scale(&g.gram, C64::new(port_weight, 0.0)))?;
    Ok(DiscreteBoundaryNode::new(NodeParts {
        label: label.into(),
        n_state: g.n_state(),
        essential,
        g: g.unit_row(g.v(cells)),
        k: g.unit_row(g.u_right()),
        l: g.l,
        x_gram,
        u_gram: HermitianGram::diagonal(&[port_weight])?,
    })?)
}

/// Wave on `(-1, 0)` with `u(-1) = 0`, input `v(0)` and output `u(0)`.
pub fn build_wave_node(n: usize) -> Result<DiscreteBoundaryNode> {
    if n < 8 {
        return Err(invalid("n_wave", format!("need at least 8 cells, got {n}")));
    }
    build_interval_wave(n, 1.0, LeftEnd::Strain, 1.0, "wave")
}

/// Wave on `(0, 1)` with `u = 0` at both ends and no ports.
pub fn build_reflective_wave(n: usize) -> Result<DiscreteBoundaryNode> {
    let g = WaveGrid::new(n, 1.0)?;
    let essential = linalg::vstack(&[&g.unit_row(g.u_left()), &g.unit_row(g.u_right())]);
    let width = g.n_state() + 2;
    Ok(DiscreteBoundaryNode::new(NodeParts {
        label: "reflective wave".into(),
        n_state: g.n_state(),
        essential,
        g: linalg::zeros(0, width),
        k: linalg::zeros(0, width),
        x_gram: HermitianGram::new(g.gram.clone())?,
        l: g.l,
        u_gram: HermitianGram::identity(0),
    })?)
}
