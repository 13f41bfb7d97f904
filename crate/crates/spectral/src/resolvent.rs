use bcs_coupling::{ConstrainedOperator, ResolventSolver};
use bcs_numerics::linalg::{self, C64};
use bcs_numerics::weighted_operator_norm;

use crate::Result;

/// Shift used to read the spectrum off a single resolvent.
const SPECTRUM_SHIFT: f64 = 1.0;
/// Resolvent eigenvalues below this fraction of the largest are the points at infinity.
const INFINITE_EIG_RTOL: f64 = 1e-13;

/// `‖(is - A)^{-1}‖_X` with the Gram of the operator on both sides.
pub fn resolvent_norm<O: ConstrainedOperator + ?Sized>(op: &O, s: f64) -> Result<f64> {
    resolvent_norm_at(op, C64::new(0.0, s))
}

pub fn resolvent_norm_at<O: ConstrainedOperator + ?Sized>(op: &O, lambda: C64) -> Result<f64> {
    let r = ResolventSolver::new(op, lambda)?.state_resolvent()?;
    Ok(weighted_operator_norm(&r, op.gram(), op.gram())?)
}

/// Finite eigenvalues of `A`, from `μ ∈ σ((1 - A)^{-1})` via `λ = 1 - 1/μ`.
pub fn spectrum<O: ConstrainedOperator + ?Sized>(op: &O) -> Result<Vec<C64>> {
    let r = ResolventSolver::new(op, C64::new(SPECTRUM_SHIFT, 0.0))?.state_resolvent()?;
    let mu = linalg::eigenvalues(&r)?;
    let top = mu.iter().map(|m| m.norm()).fold(0.0, f64::max);
    let mut out: Vec<C64> = mu
        .into_iter()
        .filter(|m| m.norm() > INFINITE_EIG_RTOL * top)
        .map(|m| C64::new(SPECTRUM_SHIFT, 0.0) - m.inv())
        .collect();
    out.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    Ok(out)
}
