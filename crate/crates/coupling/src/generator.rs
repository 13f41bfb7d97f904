use std::ops::Range;

use bcs_node::DiscreteBoundaryNode;
use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::{HermitianGram, Lu};

use crate::operator::CoupledOperator;
use crate::{CouplingError, Result};

/// A generator given by evolution rows `λ[I 0] - L` and constraint rows,
/// with state coordinates first.
pub trait ConstrainedOperator {
    fn n(&self) -> usize;
    fn n_state(&self) -> usize;
    /// Square matrix `[λ[I 0] - L; constraints]`.
    fn system_matrix(&self, lambda: C64) -> CMat;
    fn gram(&self) -> &HermitianGram;
    /// State ranges whose energies are reported separately.
    fn blocks(&self) -> Vec<Range<usize>>;
}

impl ConstrainedOperator for CoupledOperator {
    fn n(&self) -> usize {
        CoupledOperator::n(self)
    }
    fn n_state(&self) -> usize {
        CoupledOperator::n_state(self)
    }
    fn system_matrix(&self, lambda: C64) -> CMat {
        CoupledOperator::system_matrix(self, lambda)
    }
    fn gram(&self) -> &HermitianGram {
        CoupledOperator::gram(self)
    }
    fn blocks(&self) -> Vec<Range<usize>> {
        let lay = self.layout();
        vec![lay.state1(), lay.state2()]
    }
}

/// The generator `L` restricted to `Ker B` and the essential constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedNode {
    node: DiscreteBoundaryNode,
    b: CMat,
}

impl ClosedNode {
    pub fn new(node: DiscreteBoundaryNode, b: CMat) -> Result<Self> {
        if b.nrows() != node.m() || b.ncols() != node.n() {
            return Err(CouplingError::DimensionMismatch(format!(
                "boundary operator is {}x{}, expected {}x{}",
                b.nrows(),
                b.ncols(),
                node.m(),
                node.n()
            )));
        }
        Ok(Self { node, b })
    }

    /// `A = L` on `Ker G`.
    pub fn internal(node: DiscreteBoundaryNode) -> Self {
        let b = node.g().clone();
        Self { node, b }
    }

    pub fn node(&self) -> &DiscreteBoundaryNode {
        &self.node
    }
    pub fn boundary(&self) -> &CMat {
        &self.b
    }
}

impl ConstrainedOperator for ClosedNode {
    fn n(&self) -> usize {
        self.node.n()
    }
    fn n_state(&self) -> usize {
        self.node.n_state()
    }
    fn system_matrix(&self, lambda: C64) -> CMat {
        linalg::vstack(&[&self.node.evolution_matrix(lambda), self.node.essential(), &self.b])
    }
    fn gram(&self) -> &HermitianGram {
        self.node.x_gram()
    }
    fn blocks(&self) -> Vec<Range<usize>> {
        std::iter::once(0..self.node.n_state()).collect()
    }
}

/// A factored constrained system at one frequency.
#[derive(Debug)]
pub struct ResolventSolver {
    lambda: C64,
    n: usize,
    n_state: usize,
    lu: Lu,
}

impl ResolventSolver {
    pub fn new<O: ConstrainedOperator + ?Sized>(op: &O, lambda: C64) -> Result<Self> {
        Ok(Self { lambda, n: op.n(), n_state: op.n_state(), lu: Lu::factor(&op.system_matrix(lambda))? })
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    /// Full solutions for state-sized right-hand sides.
    pub fn resolve(&self, y: &CMat) -> Result<CMat> {
        if y.nrows() != self.n_state {
            return Err(CouplingError::DimensionMismatch(format!(
                "right-hand side has {} rows, state dimension is {}",
                y.nrows(),
                self.n_state
            )));
        }
        let mut rhs = linalg::zeros(self.n, y.ncols());
        rhs.as_mut().submatrix_mut(0, 0, y.nrows(), y.ncols()).copy_from(y.as_ref());
        Ok(self.lu.solve(&rhs))
    }

    /// State block of `(λ-A)^{-1}`.
    pub fn state_resolvent(&self) -> Result<CMat> {
        Ok(linalg::rows(&self.resolve(&linalg::identity(self.n_state))?, 0, self.n_state))
    }
}

/// `(λ-A)^{-1}Y` by one dense solve of the constrained system; returns full vectors.
pub fn coupled_resolvent_direct<O: ConstrainedOperator + ?Sized>(op: &O, lambda: C64, y: &CMat) -> Result<CMat> {
    ResolventSolver::new(op, lambda)?.resolve(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::test_support::string;

    #[test]
    fn closed_node_matches_node_solver() {
        let node = string(10);
        let closed = ClosedNode::internal(node.clone());
        let lambda = C64::new(0.2, 1.5);
        let r = ResolventSolver::new(&closed, lambda).unwrap().state_resolvent().unwrap();
        let full = bcs_node::restricted_resolvent(&node, node.g(), lambda, &linalg::identity(node.n_state())).unwrap();
        assert!(linalg::rel_diff(&r, &node.state_part(&full)) < 1e-14);
    }

    #[test]
    fn wrong_boundary_shape() {
        assert!(ClosedNode::new(string(4), linalg::zeros(2, 3)).is_err());
    }
}
