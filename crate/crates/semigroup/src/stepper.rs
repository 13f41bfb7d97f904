use std::ops::Range;

use bcs_coupling::{ConstrainedOperator, ResolventSolver};
use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::HermitianGram;

use crate::{Result, SemigroupError};

/// Trapezoidal step `z' = (2P - I)z` with `P = λ(λ - A)^{-1}`, `λ = 2/dt`.
///
/// The midpoint `m = Pz` solves `(λ[I 0] - L)m = λz` together with the constraint rows,
/// so `z'` satisfies them as well. Immutable once built.
#[derive(Debug, Clone)]
pub struct CayleyStepper {
    dt: f64,
    n_state: usize,
    /// `λ(λ - A)^{-1}` on state inputs, with aux rows.
    midpoint: CMat,
    /// `F(2P - I)F^{-1}` with `F^H F = G`.
    step_y: CMat,
    gram: HermitianGram,
    blocks: Vec<Range<usize>>,
}

impl CayleyStepper {
    pub fn new<O: ConstrainedOperator + ?Sized>(op: &O, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SemigroupError::InvalidConfig(format!("dt must be positive and finite, got {dt}")));
        }
        let ns = op.n_state();
        let gram = op.gram().clone();
        let blocks = op.blocks();
        check_block_diagonal(gram.matrix(), &blocks)?;
        let lambda = C64::new(2.0 / dt, 0.0);
        let solver = ResolventSolver::new(op, lambda)?;
        let midpoint = linalg::scale(&solver.resolve(&linalg::identity(ns))?, lambda);
        let s = linalg::scale(&linalg::rows(&midpoint, 0, ns), C64::new(2.0, 0.0)) - linalg::identity(ns);
        let step_y = gram.factor() * &s * gram.factor_inv();
        Ok(Self { dt, n_state: ns, midpoint, step_y, gram, blocks })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn n_state(&self) -> usize {
        self.n_state
    }
    pub fn gram(&self) -> &HermitianGram {
        &self.gram
    }
    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    fn check_len(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.n_state {
            return Err(SemigroupError::DimensionMismatch(format!(
                "state has {} entries, expected {}",
                z.len(),
                self.n_state
            )));
        }
        Ok(())
    }

    /// Full midpoint vector `(z + z')/2`, aux included.
    pub fn midpoint(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.check_len(z)?;
        Ok(linalg::column_to_vec(&(&self.midpoint * linalg::column(z)), 0))
    }

    pub fn step(&self, z: &[C64]) -> Result<Vec<C64>> {
        let m = self.midpoint(z)?;
        Ok(m.iter().zip(z).map(|(m, z)| 2.0 * m - z).collect())
    }

    pub(crate) fn to_orthonormal(&self, z: &[C64]) -> Result<CMat> {
        self.check_len(z)?;
        Ok(self.gram.factor() * linalg::column(z))
    }

    pub(crate) fn state_of(&self, y: &CMat) -> Vec<C64> {
        linalg::column_to_vec(&(self.gram.factor_inv() * y), 0)
    }

    pub(crate) fn step_y(&self, y: &CMat) -> CMat {
        &self.step_y * y
    }
}

fn check_block_diagonal(g: &CMat, blocks: &[Range<usize>]) -> Result<()> {
    let owner = |i: usize| blocks.iter().position(|b| b.contains(&i));
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            if g[(i, j)] != C64::new(0.0, 0.0) && owner(i) != owner(j) {
                return Err(SemigroupError::DimensionMismatch(format!("Gram couples state entries {i} and {j} across blocks")));
            }
        }
    }
    Ok(())
}

/// One Cayley step from scratch.
pub fn step_cayley<O: ConstrainedOperator + ?Sized>(op: &O, z: &[C64], dt: f64) -> Result<Vec<C64>> {
    CayleyStepper::new(op, dt)?.step(z)
}

/// `½‖z‖²` in the operator's Gram.
pub fn energy<O: ConstrainedOperator + ?Sized>(op: &O, z: &[C64]) -> f64 {
    0.5 * op.gram().norm_sq(z)
}
