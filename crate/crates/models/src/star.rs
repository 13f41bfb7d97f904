use bcs_coupling::{assemble_coupled, CoupledOperator};
use bcs_node::{DiscreteBoundaryNode, NodeParts};
use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::HermitianGram;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::heat::build_heat_node;
use crate::instance::Field;
use crate::wave::WaveGrid;
use crate::Result;

/// Edges `0..=N` meet at `x = 0`; edge `k` is `(0, ℓ_k)`. Edge 0 carries the port.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarParams {
    #[serde(rename = "N")]
    pub n_edges: usize,
    pub lengths: Vec<f64>,
    /// Cells per edge.
    pub n_edge: Vec<usize>,
    pub n_heat: usize,
}

impl StarParams {
    /// `ℓ₀ = 1` and `ℓ_k = φ^{-(k-1)}`, with `cells_per_unit · ℓ_k` cells per edge.
    pub fn golden(n_edges: usize, cells_per_unit: usize, n_heat: usize) -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let lengths: Vec<f64> =
            (0..=n_edges).map(|k| if k == 0 { 1.0 } else { phi.powi(-(k as i32 - 1)) }).collect();
        let n_edge = lengths.iter().map(|l| ((cells_per_unit as f64) * l).round().max(2.0) as usize).collect();
        Self { n_edges, lengths, n_edge, n_heat }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_edges < 1 {
            return Err(invalid("N", "need at least one edge besides edge 0"));
        }
        if self.lengths.len() != self.n_edges + 1 {
            return Err(invalid("lengths", format!("expected {} entries, got {}", self.n_edges + 1, self.lengths.len())));
        }
        if self.n_edge.len() != self.n_edges + 1 {
            return Err(invalid("n_edge", format!("expected {} entries, got {}", self.n_edges + 1, self.n_edge.len())));
        }
        if let Some(l) = self.lengths.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(invalid("lengths", format!("must be positive, got {l}")));
        }
        if self.n_heat < 8 {
            return Err(invalid("n_heat", format!("need at least 8 cells, got {}", self.n_heat)));
        }
        Ok(())
    }

    pub fn fields(&self) -> Vec<Field> {
        let mut out = Vec::new();
        let mut start = 0;
        for (k, &cells) in self.n_edge.iter().enumerate() {
            let xv: Vec<f64> = (0..=cells).map(|i| i as f64 / cells as f64).collect();
            let xu: Vec<f64> = (0..cells).map(|i| (i as f64 + 0.5) / cells as f64).collect();
            out.push(Field::smooth(format!("v{k}"), start, xv));
            start += cells + 1;
            let u = Field::smooth(format!("u{k}"), start, xu);
            // equal strain integrals on edges 1..N keep the state free of junction offsets
            out.push(if k == 0 { u } else { u.centered() });
            start += cells;
        }
        let xh = (0..self.n_heat).map(|i| (i as f64 + 0.5) / self.n_heat as f64).collect();
        out.push(Field::smooth("w", start, xh));
        out
    }
}

/// The network node: continuity and Kirchhoff rows at the junction,
/// `v_k(ℓ_k) = 0` for `k ≥ 1`, input `v₀(ℓ₀)` and output `u₀(ℓ₀)`.
pub fn build_star_node(params: &StarParams) -> Result<DiscreteBoundaryNode> {
    params.validate()?;
    let grids = params
        .n_edge
        .iter()
        .zip(&params.lengths)
        .map(|(&c, &l)| WaveGrid::new(c, l))
        .collect::<Result<Vec<_>>>()?;
    let n_state: usize = grids.iter().map(WaveGrid::n_state).sum();
    let edges = grids.len();
    let n = n_state + 2 * edges;
    let offsets: Vec<usize> = grids
        .iter()
        .scan(0, |acc, g| {
            let o = *acc;
            *acc += g.n_state();
            Some(o)
        })
        .collect();
    let global = |k: usize, local: usize| -> usize {
        let g = &grids[k];
        if local < g.n_state() {
            offsets[k] + local
        } else {
            n_state + 2 * k + (local - g.n_state())
        }
    };
    let mut l = linalg::zeros(n_state, n);
    let mut gram = linalg::zeros(n_state, n_state);
    for (k, g) in grids.iter().enumerate() {
        for i in 0..g.n_state() {
            for j in 0..g.n_state() + 2 {
                l[(offsets[k] + i, global(k, j))] = g.l[(i, j)];
            }
            for j in 0..g.n_state() {
                gram[(offsets[k] + i, offsets[k] + j)] = g.gram[(i, j)];
            }
        }
    }
    let row = |entries: &[(usize, f64)]| -> CMat {
        let mut r = linalg::zeros(1, n);
        for &(c, v) in entries {
            r[(0, c)] += C64::new(v, 0.0);
        }
        r
    };
    let mut ess = Vec::new();
    for (k, g) in grids.iter().enumerate().skip(1) {
        ess.push(row(&[(global(k, g.v(0)), 1.0), (global(0, grids[0].v(0)), -1.0)]));
    }
    let kirchhoff: Vec<(usize, f64)> = (0..edges).map(|k| (global(k, grids[k].u_left()), 1.0)).collect();
    ess.push(row(&kirchhoff));
    for (k, g) in grids.iter().enumerate().skip(1) {
        ess.push(row(&[(global(k, g.v(g.cells)), 1.0)]));
    }
    let essential = linalg::vstack(&ess.iter().collect::<Vec<_>>());
    Ok(DiscreteBoundaryNode::new(NodeParts {
        label: format!("star N={}", params.n_edges),
        n_state,
        l,
        essential,
        g: row(&[(global(0, grids[0].v(grids[0].cells)), 1.0)]),
        k: row(&[(global(0, grids[0].u_right()), 1.0)]),
        x_gram: HermitianGram::new(gram)?,
        u_gram: HermitianGram::identity(1),
    })?)
}

/// Star network coupled to the heat rod at the end of edge 0, with `J = Q = 1`.
pub fn build_star_network(params: &StarParams) -> Result<CoupledOperator> {
    let node = build_star_node(params)?;
    let heat = build_heat_node(params.n_heat)?;
    Ok(assemble_coupled(node, heat, linalg::identity(1))?.with_q(linalg::identity(1))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bcs_node::check_passivity;
    use bcs_numerics::random::seeded_rng;

    #[test]
    fn golden_lengths() {
        let p = StarParams::golden(3, 40, 20);
        assert_eq!(p.lengths.len(), 4);
        assert_eq!(p.lengths[1], 1.0);
        assert!((p.lengths[2] * (1.0 + 5f64.sqrt()) / 2.0 - 1.0).abs() < 1e-15);
        assert_eq!(p.n_edge[0], 40);
    }

    #[test]
    fn passive_for_several_edge_counts() {
        for n in 1..=3 {
            let node = build_star_node(&StarParams::golden(n, 30, 20)).unwrap();
            assert_eq!(node.m_ess(), 2 * n + 1);
            let rep = check_passivity(&node, 100, 1e-12, &mut seeded_rng(n as u64)).unwrap();
            assert!(rep.pass && rep.max_residual.abs() < 1e-12, "{rep:?}");
        }
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let mut p = StarParams::golden(2, 20, 20);
        p.lengths.pop();
        assert!(build_star_node(&p).is_err());
    }
}
