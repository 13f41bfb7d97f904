use bcs_node::{DiscreteBoundaryNode, NodeParts};
use bcs_numerics::linalg::{self, C64};
use bcs_numerics::HermitianGram;

use crate::error::invalid;
use crate::Result;

/// Heat on `(0, 1)` at cell centres with `w(1) = 0`, input `-w'(0)` and output `w(0)`.
///
/// Columns: `w_0..w_{N-1}`, then the end values `w_L`, `w_R`.
pub fn build_heat_node(n: usize) -> Result<DiscreteBoundaryNode> {
    if n < 8 {
        return Err(invalid("n_heat", format!("need at least 8 cells, got {n}")));
    }
    let h = 1.0 / n as f64;
    let (iwl, iwr) = (n, n + 1);
    // fluxes q_0..q_N at faces
    let mut grad = linalg::zeros(n + 1, n + 2);
    grad[(0, 0)] = C64::new(2.0 / h, 0.0);
    grad[(0, iwl)] = C64::new(-2.0 / h, 0.0);
    grad[(n, iwr)] = C64::new(2.0 / h, 0.0);
    grad[(n, n - 1)] = C64::new(-2.0 / h, 0.0);
    for i in 1..n {
        grad[(i, i)] = C64::new(1.0 / h, 0.0);
        grad[(i, i - 1)] = C64::new(-1.0 / h, 0.0);
    }
    let div = linalg::from_real(n, n + 1, |i, j| {
        if j == i + 1 {
            1.0 / h
        } else if j == i {
            -1.0 / h
        } else {
            0.0
        }
    });
    let l = &div * &grad;
    let g = linalg::scale(&linalg::rows(&grad, 0, 1), C64::new(-1.0, 0.0));
    Ok(DiscreteBoundaryNode::new(NodeParts {
        label: "heat".into(),
        n_state: n,
        l,
        essential: linalg::from_real(1, n + 2, |_, j| if j == iwr { 1.0 } else { 0.0 }),
        g,
        k: linalg::from_real(1, n + 2, |_, j| if j == iwl { 1.0 } else { 0.0 }),
        x_gram: HermitianGram::diagonal(&vec![h; n])?,
        u_gram: HermitianGram::identity(1),
    })?)
}

/// `tanh(z)` for `Re z ≥ 0` without overflow.
fn tanh_right(z: C64) -> C64 {
    let e = (-2.0 * z).exp();
    (1.0 - e) / (1.0 + e)
}

/// `tanh(√λ)/√λ` on the principal branch, with value 1 at `λ = 0`.
pub fn heat_transfer_exact(lambda: C64) -> C64 {
    if lambda == C64::new(0.0, 0.0) {
        return C64::new(1.0, 0.0);
    }
    let z = lambda.sqrt();
    tanh_right(z) / z
}

/// `Re P(is) = (sinh x + sin x) / (x (cosh x + cos x))` with `x = √(2|s|)`.
pub fn re_heat_transfer_exact(s: f64) -> f64 {
    let x = (2.0 * s.abs()).sqrt();
    if x == 0.0 {
        return 1.0;
    }
    let e = (-x).exp();
    let num = 1.0 - e * e + 2.0 * e * x.sin();
    let den = 1.0 + e * e + 2.0 * e * x.cos();
    num / (x * den)
}
