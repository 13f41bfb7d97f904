use bcs_coupling::{ConstrainedOperator, ResolventSolver};
use bcs_numerics::linalg::{self, C64};

use crate::{Result, SemigroupError};

/// Probe used when `0` is numerically in the spectrum.
pub const FALLBACK_PROBE: f64 = 1e-3;
/// Relative constraint residual accepted for classical data.
pub const CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalData {
    pub state: Vec<C64>,
    /// State and aux coordinates of the last solve.
    pub full: Vec<C64>,
    /// `0`, or `FALLBACK_PROBE` when `A` is singular.
    pub probe: f64,
    pub constraint_residual: f64,
}

/// `(A - p)^{-k} w` by `k` constrained solves, with `p = 0` when possible.
pub fn classical_data<O: ConstrainedOperator + ?Sized>(op: &O, w: &[C64], k: usize) -> Result<ClassicalData> {
    let ns = op.n_state();
    if w.len() != ns {
        return Err(SemigroupError::DimensionMismatch(format!("data has {} entries, expected {ns}", w.len())));
    }
    let mut full: Vec<C64> = w.iter().copied().chain(std::iter::repeat(C64::new(0.0, 0.0)).take(op.n() - ns)).collect();
    if k == 0 {
        let residual = constraint_residual(op, &full);
        return Ok(ClassicalData { state: w.to_vec(), full, probe: 0.0, constraint_residual: residual });
    }
    let (solver, probe) = match ResolventSolver::new(op, C64::new(0.0, 0.0)) {
        Ok(s) => (s, 0.0),
        Err(e) if e.is_singular() => match ResolventSolver::new(op, C64::new(FALLBACK_PROBE, 0.0)) {
            Ok(s) => (s, FALLBACK_PROBE),
            Err(e) if e.is_singular() => return Err(SemigroupError::SingularAtProbes { fallback: FALLBACK_PROBE }),
            Err(e) => return Err(e.into()),
        },
        Err(e) => return Err(e.into()),
    };
    for _ in 0..k {
        let x = solver.resolve(&linalg::column(&full[..ns]))?;
        full = linalg::column_to_vec(&x, 0).into_iter().map(|v| -v).collect();
    }
    let residual = constraint_residual(op, &full);
    if !(residual <= CONSTRAINT_TOL) {
        return Err(SemigroupError::ConstraintResidual { residual, tol: CONSTRAINT_TOL });
    }
    Ok(ClassicalData { state: full[..ns].to_vec(), full, probe, constraint_residual: residual })
}

/// `max |Cz| / max |z|` over the constraint rows.
pub fn constraint_residual<O: ConstrainedOperator + ?Sized>(op: &O, full: &[C64]) -> f64 {
    let ns = op.n_state();
    let r = linalg::matvec(&op.system_matrix(C64::new(0.0, 0.0)), full);
    let num = r[ns..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let den = full.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// State rows `Lz` of a full vector.
pub fn apply_generator<O: ConstrainedOperator + ?Sized>(op: &O, full: &[C64]) -> Result<Vec<C64>> {
    if full.len() != op.n() {
        return Err(SemigroupError::DimensionMismatch(format!("vector has {} entries, expected {}", full.len(), op.n())));
    }
    let r = linalg::matvec(&op.system_matrix(C64::new(0.0, 0.0)), full);
    Ok(r[..op.n_state()].iter().map(|v| -v).collect())
}
