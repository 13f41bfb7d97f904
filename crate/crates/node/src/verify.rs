use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::random::complex_normal_vec;
use bcs_numerics::{hermitian_min_eig, weighted_operator_norm};
use rand::Rng;
use serde::Serialize;

use crate::node::{DiscreteBoundaryNode, NodeSolver, TransferSample};
use crate::{NodeError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct PassivityReport {
    pub trials: usize,
    /// Largest `Re⟨Lx,x⟩ - Re⟨Gx,Kx⟩` per unit energy; positive values are violations.
    pub max_residual: f64,
    pub pass: bool,
}

/// Impedance passivity on random vectors in the kernel of the essential constraints.
pub fn check_passivity<R: Rng + ?Sized>(
    node: &DiscreteBoundaryNode,
    trials: usize,
    tol: f64,
    rng: &mut R,
) -> Result<PassivityReport> {
    let proj = node.essential_projector()?;
    let mut max_residual = f64::NEG_INFINITY;
    for _ in 0..trials {
        let x = linalg::matvec(&proj, &complex_normal_vec(rng, node.n()));
        let (r, energy) = passivity_residual(node, &x);
        max_residual = max_residual.max(if energy > 0.0 { r / energy } else { 0.0 });
    }
    if trials == 0 {
        max_residual = 0.0;
    }
    Ok(PassivityReport { trials, max_residual, pass: max_residual <= tol })
}

/// `(Re⟨Lx,x⟩_X - Re⟨Gx,Kx⟩_U, ‖x‖²_X)` for a full vector `x`.
pub fn passivity_residual(node: &DiscreteBoundaryNode, x: &[C64]) -> (f64, f64) {
    let xs = &x[..node.n_state()];
    let lx = linalg::matvec(node.l(), x);
    let gx = linalg::matvec(node.g(), x);
    let kx = linalg::matvec(node.k(), x);
    let r = node.x_gram().inner(&lx, xs).re - node.u_gram().inner(&gx, &kx).re;
    (r, node.x_gram().norm_sq(xs))
}

/// `(λ - A_B)^{-1} Y` as full vectors (state and auxiliary traces).
pub fn restricted_resolvent(node: &DiscreteBoundaryNode, b: &CMat, lambda: C64, y: &CMat) -> Result<CMat> {
    NodeSolver::new(node, b, lambda)?.resolve(y)
}

pub fn transfer(node: &DiscreteBoundaryNode, b: &CMat, lambda: C64) -> Result<TransferSample> {
    Ok(NodeSolver::new(node, b, lambda)?.transfer())
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub gh_residual: f64,
    pub kh_residual: f64,
    pub essential_residual: f64,
    pub interior_residual: f64,
    /// Largest relative residual of `(λ-A)^{-1}(λ-L)x = x - H(λ)Gx` over the trials.
    pub resolvent_identity_residual: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.gh_residual,
            self.kh_residual,
            self.essential_residual,
            self.interior_residual,
            self.resolvent_identity_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn verify_node_identities<R: Rng + ?Sized>(
    node: &DiscreteBoundaryNode,
    lambda: C64,
    trials: usize,
    rng: &mut R,
) -> Result<IdentityReport> {
    let solver = NodeSolver::new(node, node.g(), lambda)?;
    let t = solver.transfer();
    let m = node.m();
    let hnorm = linalg::max_abs(&t.h).max(1.0);
    let gh_residual = linalg::max_abs(&(node.g() * &t.h - linalg::identity(m)));
    let kh_residual = linalg::max_abs(&(node.k() * &t.h - &t.p));
    let essential_residual = linalg::max_abs(&(node.essential() * &t.h)) / hnorm;
    let interior_residual = linalg::max_abs(&(node.evolution_matrix(lambda) * &t.h)) / hnorm;
    let proj = node.essential_projector()?;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let x = linalg::column(&linalg::matvec(&proj, &complex_normal_vec(rng, node.n())));
        let y = node.evolution_matrix(lambda) * &x;
        let lhs = solver.resolve(&y)?;
        let rhs = &x - &t.h * (node.g() * &x);
        worst = worst.max(linalg::rel_diff(&lhs, &rhs));
    }
    Ok(IdentityReport { gh_residual, kh_residual, essential_residual, interior_residual, resolvent_identity_residual: worst })
}

/// Relative residual of `H(λ) - H(μ) = (μ-λ)(λ-A)^{-1} H(μ)`.
pub fn verify_resolvent_identity(node: &DiscreteBoundaryNode, lambda: C64, mu: C64) -> Result<f64> {
    let sl = NodeSolver::new(node, node.g(), lambda)?;
    let hl = sl.lift();
    let hm = NodeSolver::new(node, node.g(), mu)?.lift();
    let lhs = &hl - &hm;
    let rhs = linalg::scale(&sl.resolve(&node.state_part(&hm))?, mu - lambda);
    Ok(linalg::frobenius(&(&lhs - &rhs)) / linalg::frobenius(&hl).max(linalg::frobenius(&hm)))
}

#[derive(Debug, Clone, Serialize)]
pub struct SquareEstimateReport {
    pub h_norm_sq: f64,
    pub k_resolvent_norm_sq: f64,
    /// `‖P(λ)‖ / Re λ`.
    pub bound: f64,
    pub pass: bool,
}

/// `‖H(λ)‖² ≤ ‖P(λ)‖/Re λ` and `‖K(λ-A)^{-1}‖² ≤ ‖P(λ)‖/Re λ` in the node's norms.
pub fn verify_square_estimates(node: &DiscreteBoundaryNode, lambda: C64) -> Result<SquareEstimateReport> {
    if !(lambda.re > 0.0) {
        return Err(NodeError::RequiresOpenHalfPlane { re: lambda.re });
    }
    let solver = NodeSolver::new(node, node.g(), lambda)?;
    let t = solver.transfer();
    let h_norm = weighted_operator_norm(&node.state_part(&t.h), node.x_gram(), node.u_gram())?;
    let r = solver.resolve(&linalg::identity(node.n_state()))?;
    let kr_norm = weighted_operator_norm(&(node.k() * &r), node.u_gram(), node.x_gram())?;
    let p_norm = weighted_operator_norm(&t.p, node.u_gram(), node.u_gram())?;
    let bound = p_norm / lambda.re;
    let (h_norm_sq, k_resolvent_norm_sq) = (h_norm * h_norm, kr_norm * kr_norm);
    let pass = h_norm_sq <= bound + 1e-10 && k_resolvent_norm_sq <= bound + 1e-10;
    Ok(SquareEstimateReport { h_norm_sq, k_resolvent_norm_sq, bound, pass })
}

/// Smallest eigenvalue of `Re P(λ)` in the port inner product.
pub fn min_re_transfer(node: &DiscreteBoundaryNode, lambda: C64) -> Result<f64> {
    let t = transfer(node, node.g(), lambda)?;
    Ok(hermitian_min_eig(&t.p, node.u_gram())?)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::node::NodeParts;
    use bcs_numerics::linalg::from_real;
    use bcs_numerics::HermitianGram;

    /// A lossless string of `n` cells: v at nodes 0..=n, u at centers, aux u_L, u_R.
    pub(crate) fn string(n: usize) -> DiscreteBoundaryNode {
        let h = 1.0 / n as f64;
        let ns = 2 * n + 1;
        let (iul, iur) = (ns, ns + 1);
        let w: Vec<f64> = (0..=n).map(|i| if i == 0 || i == n { h / 2.0 } else { h }).collect();
        let mut l = linalg::zeros(ns, ns + 2);
        for i in 0..=n {
            let left = if i == 0 { iul } else { n + i };
            let right = if i == n { iur } else { n + 1 + i };
            l[(i, right)] += C64::new(1.0 / w[i], 0.0);
            l[(i, left)] -= C64::new(1.0 / w[i], 0.0);
        }
        for i in 0..n {
            l[(n + 1 + i, i + 1)] += C64::new(1.0 / h, 0.0);
            l[(n + 1 + i, i)] -= C64::new(1.0 / h, 0.0);
        }
        let mut gw = w.clone();
        gw.extend(std::iter::repeat(h).take(n));
        DiscreteBoundaryNode::new(NodeParts {
            label: "string".into(),
            n_state: ns,
            l,
            essential: from_real(1, ns + 2, |_, j| if j == iul { 1.0 } else { 0.0 }),
            g: from_real(1, ns + 2, |_, j| if j == n { 1.0 } else { 0.0 }),
            k: from_real(1, ns + 2, |_, j| if j == iur { 1.0 } else { 0.0 }),
            x_gram: HermitianGram::diagonal(&gw).unwrap(),
            u_gram: HermitianGram::identity(1),
        })
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bcs_numerics::random::seeded_rng;
    use proptest::prelude::*;

    use super::test_support::string;

    #[test]
    fn zero_vector_has_zero_residual() {
        let node = string(8);
        let (r, e) = passivity_residual(&node, &vec![C64::new(0.0, 0.0); node.n()]);
        assert_eq!((r, e), (0.0, 0.0));
    }

    #[test]
    fn string_is_passive_with_equality() {
        let node = string(20);
        let mut rng = seeded_rng(1);
        let rep = check_passivity(&node, 200, 1e-12, &mut rng).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.max_residual.abs() < 1e-12);
    }

    #[test]
    fn identities_hold() {
        let node = string(16);
        let mut rng = seeded_rng(2);
        for lambda in [C64::new(1.0, 2.0), C64::new(0.0, 10.0), C64::new(-3.0, 2.0)] {
            let rep = verify_node_identities(&node, lambda, 20, &mut rng).unwrap();
            assert!(rep.max_residual() < 1e-9, "{lambda} {rep:?}");
        }
    }

    #[test]
    fn square_estimates_and_half_plane() {
        let node = string(16);
        let rep = verify_square_estimates(&node, C64::new(0.5, 20.0)).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(matches!(
            verify_square_estimates(&node, C64::new(0.0, 1.0)),
            Err(NodeError::RequiresOpenHalfPlane { .. })
        ));
    }

    #[test]
    fn resolvent_of_zero_is_zero() {
        let node = string(6);
        let x = restricted_resolvent(&node, node.g(), C64::new(1.0, 0.0), &linalg::zeros(node.n_state(), 2)).unwrap();
        assert_eq!(linalg::max_abs(&x), 0.0);
    }

    #[test]
    fn transfer_has_nonnegative_real_part() {
        let node = string(12);
        for s in [0.0, 0.3, 2.0, 7.0] {
            assert!(min_re_transfer(&node, C64::new(0.2, s)).unwrap() >= -1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn resolvent_identity(a in 0.05f64..3.0, b in -30.0f64..30.0, c in 0.05f64..3.0, d in -30.0f64..30.0) {
            let node = string(10);
            let r = verify_resolvent_identity(&node, C64::new(a, b), C64::new(c, d)).unwrap();
            prop_assert!(r < 1e-8, "residual {}", r);
        }
    }
}
