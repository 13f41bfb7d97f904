use bcs_numerics::json;
use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::{hermitian_min_eig, weighted_operator_norm, HermitianGram, Lu};
use serde::{Deserialize, Serialize};

use crate::node::{DiscreteBoundaryNode, NodeParts, NodeSolver};
use crate::{NodeError, Result};

const SELF_ADJOINT_RTOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;
const SWAP_SIGMA_MIN: f64 = 1e-12;

/// Port embedding `J: U -> V` and a nonnegative self-adjoint `Q` on `V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackSpec {
    #[serde(with = "json::matrix")]
    pub j: CMat,
    #[serde(with = "json::matrix")]
    pub q: CMat,
    #[serde(with = "json::gram")]
    pub v_gram: HermitianGram,
    /// Recorded lower bound `Re Q ≥ cI`, if any.
    pub c: Option<f64>,
}

impl FeedbackSpec {
    pub fn new(j: CMat, q: CMat, v_gram: HermitianGram, c: Option<f64>) -> Result<Self> {
        let mv = v_gram.dim();
        if q.nrows() != mv || q.ncols() != mv || j.nrows() != mv {
            return Err(NodeError::DimensionMismatch(format!(
                "J is {}x{}, Q is {}x{}, V has dimension {mv}",
                j.nrows(),
                j.ncols(),
                q.nrows(),
                q.ncols()
            )));
        }
        let wq = v_gram.matrix() * &q;
        let asym = linalg::max_abs(&(&wq - wq.adjoint()));
        if asym > SELF_ADJOINT_RTOL * linalg::max_abs(&wq).max(1.0) {
            return Err(NodeError::InvalidFeedback(format!("Q is not self-adjoint (asymmetry {asym:.3e})")));
        }
        let min_eig = hermitian_min_eig(&q, &v_gram)?;
        if min_eig < -PSD_TOL {
            return Err(NodeError::InvalidFeedback(format!("Q has eigenvalue {min_eig:.6e} < 0")));
        }
        if let Some(c) = c {
            if !(c > 0.0) || min_eig < c - PSD_TOL {
                return Err(NodeError::InvalidFeedback(format!("recorded c = {c} exceeds min eig {min_eig}")));
            }
        }
        Ok(Self { j, q, v_gram, c })
    }

    /// `J = I`, `Q = qI` on a space with the given Gram.
    pub fn scalar(q: f64, gram: HermitianGram) -> Result<Self> {
        let m = gram.dim();
        let c = if q > 0.0 { Some(q) } else { None };
        Self::new(linalg::identity(m), linalg::scale(&linalg::identity(m), C64::new(q, 0.0)), gram, c)
    }

    pub fn min_eig(&self) -> Result<f64> {
        Ok(hermitian_min_eig(&self.q, &self.v_gram)?)
    }

    /// `J^*: V -> U` with respect to the port Grams.
    pub fn j_adjoint(&self, u_gram: &HermitianGram) -> CMat {
        HermitianGram::adjoint_between(&self.j, &self.v_gram, u_gram)
    }

    /// `J^* Q J` on `U`.
    pub fn damping(&self, u_gram: &HermitianGram) -> CMat {
        self.j_adjoint(u_gram) * &self.q * &self.j
    }

    fn check_ports(&self, node: &DiscreteBoundaryNode) -> Result<()> {
        if self.j.ncols() != node.m() {
            return Err(NodeError::DimensionMismatch(format!(
                "J has {} columns, node has {} ports",
                self.j.ncols(),
                node.m()
            )));
        }
        Ok(())
    }
}

/// `B_Q = G + J^* Q J K`.
pub fn feedback_boundary(node: &DiscreteBoundaryNode, fb: &FeedbackSpec) -> Result<CMat> {
    fb.check_ports(node)?;
    Ok(node.g() + fb.damping(node.u_gram()) * node.k())
}

#[derive(Debug, Clone, Serialize)]
pub struct FeedbackReport {
    pub h_rel: f64,
    pub p_rel: f64,
    /// `‖J P_Q(λ) J^*‖` on `V`.
    pub jpj_norm: f64,
    /// `1/c` when `Q ≥ cI` with `c > 0`.
    pub jpj_bound: Option<f64>,
}

impl FeedbackReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.h_rel <= tol && self.p_rel <= tol && self.jpj_bound.map_or(true, |b| self.jpj_norm <= b * (1.0 + tol))
    }
}

/// Compares the transfer functions of `(B_Q, L, K)` with `H(I + J^*QJP)^{-1}` and `P(I + J^*QJP)^{-1}`.
pub fn verify_feedback_formulas(node: &DiscreteBoundaryNode, fb: &FeedbackSpec, lambda: C64) -> Result<FeedbackReport> {
    let bq = feedback_boundary(node, fb)?;
    let direct = NodeSolver::new(node, &bq, lambda)?.transfer();
    let base = NodeSolver::new(node, node.g(), lambda)?.transfer();
    let d = fb.damping(node.u_gram());
    let factor = linalg::identity(node.m()) + &d * &base.p;
    let lu = Lu::factor(&factor.transpose().to_owned())?;
    // X (I + DP) = Y  <=>  (I + DP)^T X^T = Y^T
    let right_solve = |y: &CMat| -> CMat { lu.solve(&y.transpose().to_owned()).transpose().to_owned() };
    let h_formula = right_solve(&base.h);
    let p_formula = right_solve(&base.p);
    let jpj = &fb.j * &direct.p * fb.j_adjoint(node.u_gram());
    let jpj_norm = weighted_operator_norm(&jpj, &fb.v_gram, &fb.v_gram)?;
    let c = fb.c.or_else(|| fb.min_eig().ok().filter(|e| *e > PSD_TOL));
    Ok(FeedbackReport {
        h_rel: linalg::rel_diff(&direct.h, &h_formula),
        p_rel: linalg::rel_diff(&direct.p, &p_formula),
        jpj_norm,
        jpj_bound: c.map(|c| 1.0 / c),
    })
}

/// The node `(K, L, G)`.
pub fn swap_node(node: &DiscreteBoundaryNode) -> Result<DiscreteBoundaryNode> {
    let mut p: NodeParts = node.clone().into();
    std::mem::swap(&mut p.g, &mut p.k);
    DiscreteBoundaryNode::new(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct SwapReport {
    pub sigma_min: f64,
    /// `max |P_*(λ) P(λ) - I|`.
    pub residual: f64,
}

pub fn verify_swap(node: &DiscreteBoundaryNode, lambda: C64) -> Result<SwapReport> {
    let p = NodeSolver::new(node, node.g(), lambda)?.transfer().p;
    let sigma_min = linalg::smallest_singular_value(&p)?;
    if sigma_min < SWAP_SIGMA_MIN {
        return Err(NodeError::NotInvertibleTransfer { sigma_min });
    }
    let swapped = swap_node(node)?;
    let ps = NodeSolver::new(&swapped, swapped.g(), lambda)?.transfer().p;
    let residual = linalg::max_abs(&(&ps * &p - linalg::identity(node.m())));
    Ok(SwapReport { sigma_min, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::check_passivity;
    use bcs_numerics::linalg::from_real;
    use bcs_numerics::random::seeded_rng;

    fn string(n: usize) -> DiscreteBoundaryNode {
        crate::verify::test_support::string(n)
    }

    #[test]
    fn zero_q_gives_g() {
        let node = string(8);
        let fb = FeedbackSpec::scalar(0.0, HermitianGram::identity(1)).unwrap();
        assert_eq!(feedback_boundary(&node, &fb).unwrap(), node.g().clone());
        let rep = verify_feedback_formulas(&node, &fb, C64::new(0.5, 3.0)).unwrap();
        assert!(rep.h_rel < 1e-12 && rep.p_rel < 1e-12);
    }

    #[test]
    fn rejects_negative_q() {
        let err = FeedbackSpec::scalar(-0.1, HermitianGram::identity(1)).unwrap_err();
        assert!(matches!(err, NodeError::InvalidFeedback(_)));
        let q = from_real(2, 2, |i, j| if i == j { 1.0 } else if i < j { 0.5 } else { 0.0 });
        assert!(FeedbackSpec::new(linalg::identity(2), q, HermitianGram::identity(2), None).is_err());
    }

    #[test]
    fn damped_node_is_passive_and_formulas_agree() {
        let node = string(16);
        let fb = FeedbackSpec::scalar(1.0, HermitianGram::identity(1)).unwrap();
        let damped = node.with_boundary(&feedback_boundary(&node, &fb).unwrap()).unwrap();
        let rep = check_passivity(&damped, 100, 1e-12, &mut seeded_rng(3)).unwrap();
        assert!(rep.pass);
        for lambda in [C64::new(0.0, 3.0), C64::new(0.0, 1.0), C64::new(1.0, 1.0)] {
            let r = verify_feedback_formulas(&node, &fb, lambda).unwrap();
            assert!(r.passes(1e-8), "{lambda} {r:?}");
        }
    }

    #[test]
    fn swap_is_an_involution_and_inverts_p() {
        let node = string(10);
        let twice = swap_node(&swap_node(&node).unwrap()).unwrap();
        assert_eq!(twice, node);
        let rep = verify_swap(&node, C64::new(1.0, 0.0)).unwrap();
        assert!(rep.residual < 1e-8);
    }
}
