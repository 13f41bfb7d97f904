use std::ops::Range;

use bcs_numerics::json;
use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::{HermitianGram, Lu};
use serde::{Deserialize, Serialize};

use crate::{NodeError, Result};

const RIGHT_INVERSE_RTOL: f64 = 1e-10;

/// Matrices of a node before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeParts {
    pub label: String,
    pub n_state: usize,
    #[serde(with = "json::matrix")]
    pub l: CMat,
    #[serde(with = "json::matrix")]
    pub essential: CMat,
    #[serde(with = "json::matrix")]
    pub g: CMat,
    #[serde(with = "json::matrix")]
    pub k: CMat,
    #[serde(with = "json::gram")]
    pub x_gram: HermitianGram,
    #[serde(with = "json::gram")]
    pub u_gram: HermitianGram,
}

/// A validated finite-dimensional boundary node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NodeParts", into = "NodeParts")]
pub struct DiscreteBoundaryNode {
    label: String,
    n_state: usize,
    l: CMat,
    essential: CMat,
    g: CMat,
    k: CMat,
    x_gram: HermitianGram,
    u_gram: HermitianGram,
}

impl TryFrom<NodeParts> for DiscreteBoundaryNode {
    type Error = NodeError;
    fn try_from(p: NodeParts) -> Result<Self> {
        Self::new(p)
    }
}

impl From<DiscreteBoundaryNode> for NodeParts {
    fn from(n: DiscreteBoundaryNode) -> Self {
        NodeParts {
            label: n.label,
            n_state: n.n_state,
            l: n.l,
            essential: n.essential,
            g: n.g,
            k: n.k,
            x_gram: n.x_gram,
            u_gram: n.u_gram,
        }
    }
}

impl DiscreteBoundaryNode {
    pub fn new(p: NodeParts) -> Result<Self> {
        let n_state = p.n_state;
        let n = p.l.ncols();
        let m = p.g.nrows();
        let m_ess = p.essential.nrows();
        let dims = |what: &str, got: (usize, usize), want: (usize, usize)| {
            if got != want {
                Err(NodeError::DimensionMismatch(format!("{what} is {}x{}, expected {}x{}", got.0, got.1, want.0, want.1)))
            } else {
                Ok(())
            }
        };
        dims("L", (p.l.nrows(), n), (n_state, n))?;
        dims("essential", (m_ess, p.essential.ncols()), (m_ess, n))?;
        dims("G", (m, p.g.ncols()), (m, n))?;
        dims("K", (p.k.nrows(), p.k.ncols()), (m, n))?;
        dims("x_gram", (p.x_gram.dim(), p.x_gram.dim()), (n_state, n_state))?;
        dims("u_gram", (p.u_gram.dim(), p.u_gram.dim()), (m, m))?;
        if n < n_state || n - n_state != m_ess + m {
            return Err(NodeError::DimensionMismatch(format!(
                "{} auxiliary columns but {} essential rows and {} ports",
                n.saturating_sub(n_state),
                m_ess,
                m
            )));
        }
        for (name, mat) in [("L", &p.l), ("essential", &p.essential), ("G", &p.g), ("K", &p.k)] {
            if !linalg::all_finite(mat) {
                return Err(NodeError::NonFinite(name.into()));
            }
        }
        let stacked = linalg::vstack(&[&p.essential, &p.g]);
        if stacked.nrows() > 0 {
            let sv = linalg::singular_values(&stacked)?;
            let smin = *sv.last().unwrap();
            if sv.len() < stacked.nrows() || !(smin > RIGHT_INVERSE_RTOL * sv[0]) {
                return Err(NodeError::NotRightInvertible { sigma_min: smin });
            }
        }
        Ok(Self {
            label: p.label,
            n_state,
            l: p.l,
            essential: p.essential,
            g: p.g,
            k: p.k,
            x_gram: p.x_gram,
            u_gram: p.u_gram,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }
    /// Total number of columns: state plus auxiliary traces.
    pub fn n(&self) -> usize {
        self.l.ncols()
    }
    pub fn n_state(&self) -> usize {
        self.n_state
    }
    pub fn n_aux(&self) -> usize {
        self.n() - self.n_state
    }
    pub fn m(&self) -> usize {
        self.g.nrows()
    }
    pub fn m_ess(&self) -> usize {
        self.essential.nrows()
    }
    /// Rows of the square system that carry the evolution equation.
    pub fn interior_rows(&self) -> Range<usize> {
        0..self.n_state
    }
    pub fn l(&self) -> &CMat {
        &self.l
    }
    pub fn essential(&self) -> &CMat {
        &self.essential
    }
    pub fn g(&self) -> &CMat {
        &self.g
    }
    pub fn k(&self) -> &CMat {
        &self.k
    }
    pub fn x_gram(&self) -> &HermitianGram {
        &self.x_gram
    }
    pub fn u_gram(&self) -> &HermitianGram {
        &self.u_gram
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The node `(B, L, K)` with the same interior and output trace.
    pub fn with_boundary(&self, b: &CMat) -> Result<Self> {
        let mut p: NodeParts = self.clone().into();
        p.g = b.clone();
        p.label = format!("{} [B]", self.label);
        Self::new(p)
    }

    /// `λ[I 0] - L`.
    pub fn evolution_matrix(&self, lambda: C64) -> CMat {
        let mut a = linalg::scale(&self.l, C64::new(-1.0, 0.0));
        for i in 0..self.n_state {
            a[(i, i)] += lambda;
        }
        a
    }

    pub fn system_matrix(&self, b: &CMat, lambda: C64) -> Result<CMat> {
        if b.nrows() != self.m() || b.ncols() != self.n() {
            return Err(NodeError::DimensionMismatch(format!(
                "boundary operator is {}x{}, expected {}x{}",
                b.nrows(),
                b.ncols(),
                self.m(),
                self.n()
            )));
        }
        Ok(linalg::vstack(&[&self.evolution_matrix(lambda), &self.essential, b]))
    }

    pub fn state_part(&self, x: &CMat) -> CMat {
        linalg::rows(x, 0, self.n_state)
    }

    /// Euclidean projector onto the kernel of the essential constraints.
    pub fn essential_projector(&self) -> Result<CMat> {
        kernel_projector(&self.essential)
    }
}

/// `I - C^H (C C^H)^{-1} C`.
pub fn kernel_projector(c: &CMat) -> Result<CMat> {
    let n = c.ncols();
    if c.nrows() == 0 {
        return Ok(linalg::identity(n));
    }
    let cch = c * c.adjoint();
    let y = Lu::factor(&cch)?.solve(c);
    Ok(linalg::identity(n) - c.adjoint() * &y)
}

/// A factored square system for one boundary operator at one frequency.
pub struct NodeSolver<'a> {
    node: &'a DiscreteBoundaryNode,
    lambda: C64,
    lu: Lu,
}

impl<'a> NodeSolver<'a> {
    pub fn new(node: &'a DiscreteBoundaryNode, b: &CMat, lambda: C64) -> Result<Self> {
        let lu = Lu::factor(&node.system_matrix(b, lambda)?)?;
        Ok(Self { node, lambda, lu })
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    /// Full solutions of `[λE - L; essential; B] x = [y; 0; 0]` for state-sized `y`.
    pub fn resolve(&self, y: &CMat) -> Result<CMat> {
        if y.nrows() != self.node.n_state {
            return Err(NodeError::DimensionMismatch(format!(
                "right-hand side has {} rows, state dimension is {}",
                y.nrows(),
                self.node.n_state
            )));
        }
        let mut rhs = linalg::zeros(self.node.n(), y.ncols());
        rhs.as_mut().submatrix_mut(0, 0, y.nrows(), y.ncols()).copy_from(y.as_ref());
        Ok(self.lu.solve(&rhs))
    }

    /// Solutions of `[λE - L; essential; B] h = [0; 0; I]`.
    pub fn lift(&self) -> CMat {
        let n = self.node.n();
        let m = self.node.m();
        let mut rhs = linalg::zeros(n, m);
        for i in 0..m {
            rhs[(n - m + i, i)] = C64::new(1.0, 0.0);
        }
        self.lu.solve(&rhs)
    }

    pub fn transfer(&self) -> TransferSample {
        let h = self.lift();
        let p = self.node.k() * &h;
        TransferSample { lambda: self.lambda, h, p }
    }
}

/// `H(λ)` (full columns) and `P(λ) = K H(λ)`.
#[derive(Debug, Clone)]
pub struct TransferSample {
    pub lambda: C64,
    pub h: CMat,
    pub p: CMat,
}
