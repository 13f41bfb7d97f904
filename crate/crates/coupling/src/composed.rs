use bcs_node::{transfer, DiscreteBoundaryNode, NodeSolver};
use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::{hermitian_min_eig, smallest_singular_value};
use serde::Serialize;

use crate::operator::{CoupledOperator, Partner};
use crate::{CouplingError, Result};

const COERCIVITY_TOL: f64 = 1e-12;
const INVERTIBLE_TOL: f64 = 1e-10;

/// Ingredients of the block form of `(λ-A)^{-1}`.
#[derive(Debug, Clone)]
pub struct ComposedResolventParts {
    pub lambda: C64,
    pub p2: CMat,
    /// `G₁ + J^*P₂(λ)JK₁`.
    pub boundary: CMat,
    /// Lift for `boundary`, full first-node columns.
    pub h_lambda: CMat,
    /// Lift of the partner, full partner columns.
    pub h2: CMat,
    /// `K₂(λ-A₂)^{-1}` on the partner state.
    pub k2_resolvent: CMat,
}

impl ComposedResolventParts {
    /// `S_λ^{-1} y` for state-sized `y`, returned as full first-node vectors.
    pub fn s_inverse(&self, node1: &DiscreteBoundaryNode, y: &CMat) -> Result<CMat> {
        Ok(NodeSolver::new(node1, &self.boundary, self.lambda)?.resolve(y)?)
    }

    /// `(max |B H_λ - I|, max |(λ-L₁) H_λ| relative to H_λ)`.
    pub fn residuals(&self, node1: &DiscreteBoundaryNode) -> (f64, f64) {
        let m = self.boundary.nrows();
        let b = linalg::max_abs(&(&self.boundary * &self.h_lambda - linalg::identity(m)));
        let interior = linalg::max_abs(&(node1.evolution_matrix(self.lambda) * &self.h_lambda))
            / linalg::max_abs(&self.h_lambda).max(1.0);
        (b, interior)
    }
}

/// `(λ-A)^{-1}Y` assembled from the two subsystems; full coupled vectors.
pub fn coupled_resolvent_composed(
    op: &CoupledOperator,
    lambda: C64,
    y: &CMat,
) -> Result<(CMat, ComposedResolventParts)> {
    let lay = op.layout();
    if y.nrows() != lay.n_state() {
        return Err(CouplingError::DimensionMismatch(format!(
            "right-hand side has {} rows, state dimension is {}",
            y.nrows(),
            lay.n_state()
        )));
    }
    let node1 = op.node1();
    let y1 = linalg::rows(y, 0, lay.n_state1);
    let y2 = linalg::rows(y, lay.n_state1, lay.n_state2);
    let id2 = linalg::identity(lay.n_state2);
    let (p2, h2, r2) = match op.partner() {
        Partner::Node(node2) => {
            let s2 = NodeSolver::new(node2, node2.g(), lambda)?;
            let h2 = s2.lift();
            (node2.k() * &h2, h2, s2.resolve(&id2)?)
        }
        Partner::System(sys) => {
            let lu = sys.resolvent_factor(lambda)?;
            let h2 = lu.solve(sys.b());
            (sys.c() * &h2 + sys.d(), h2, lu.solve(&id2))
        }
    };
    let k2_resolvent = match op.partner() {
        Partner::Node(node2) => node2.k() * &r2,
        Partner::System(sys) => sys.c() * linalg::rows(&r2, 0, lay.n_state2),
    };
    let min_eig = hermitian_min_eig(&p2, op.partner().u_gram())?;
    if min_eig < COERCIVITY_TOL {
        return Err(CouplingError::CoercivityFailure { min_eig });
    }
    let js = op.j_adjoint();
    let j = op.j();
    let boundary = node1.g() + &js * &p2 * j * node1.k();
    let s = NodeSolver::new(node1, &boundary, lambda)?;
    let h_lambda = s.lift();
    let x1 = s.resolve(&y1)? + &h_lambda * (&js * &k2_resolvent * &y2);
    let x2 = &r2 * &y2 - &h2 * (j * (node1.k() * &x1));
    let parts = ComposedResolventParts { lambda, p2, boundary, h_lambda, h2, k2_resolvent };
    Ok((op.join(&x1, &x2), parts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralTest {
    pub in_resolvent: bool,
    pub sigma_min: f64,
}

/// `σ_min(I + J^*P₂(is)JP₁(is))`; `is` lies in the resolvent set iff it is nonzero.
pub fn spectral_test(op: &CoupledOperator, s: f64) -> Result<SpectralTest> {
    let lambda = C64::new(0.0, s);
    let node1 = op.node1();
    let p1 = transfer(node1, node1.g(), lambda)?.p;
    let p2 = op.partner().transfer(lambda)?;
    let m = linalg::identity(node1.m()) + op.j_adjoint() * &p2 * op.j() * &p1;
    let sigma_min = smallest_singular_value(&m)?;
    Ok(SpectralTest { in_resolvent: sigma_min > INVERTIBLE_TOL, sigma_min })
}
