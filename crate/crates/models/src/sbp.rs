use bcs_numerics::linalg::{self, CMat};
use bcs_numerics::HermitianGram;

use crate::error::invalid;
use crate::Result;

const SBP_TOL: f64 = 1e-14;

/// Second-order summation-by-parts first derivative on a uniform grid.
#[derive(Debug, Clone)]
pub struct SbpOperators {
    pub n: usize,
    pub h: f64,
    pub d1: CMat,
    pub hnorm: HermitianGram,
}

impl SbpOperators {
    /// `max |H D1 + (H D1)^T - diag(-1, 0, …, 0, 1)|`.
    pub fn sbp_residual(&self) -> f64 {
        let q = self.hnorm.matrix() * &self.d1;
        let mut e = &q + q.transpose();
        e[(0, 0)] += 1.0;
        e[(self.n - 1, self.n - 1)] -= 1.0;
        linalg::max_abs(&e)
    }
}

pub fn sbp_first_derivative(n: usize, h: f64) -> Result<SbpOperators> {
    if n < 3 {
        return Err(invalid("n", format!("need at least 3 grid points, got {n}")));
    }
    if !(h > 0.0) {
        return Err(invalid("h", "spacing must be positive"));
    }
    let d1 = linalg::from_real(n, n, |i, j| {
        if i == 0 {
            match j {
                0 => -1.0 / h,
                1 => 1.0 / h,
                _ => 0.0,
            }
        } else if i == n - 1 {
            match j {
                _ if j == n - 1 => 1.0 / h,
                _ if j == n - 2 => -1.0 / h,
                _ => 0.0,
            }
        } else if j + 1 == i {
            -0.5 / h
        } else if j == i + 1 {
            0.5 / h
        } else {
            0.0
        }
    });
    let w: Vec<f64> = (0..n).map(|i| if i == 0 || i == n - 1 { h / 2.0 } else { h }).collect();
    let ops = SbpOperators { n, h, d1, hnorm: HermitianGram::diagonal(&w)? };
    let r = ops.sbp_residual();
    if r > SBP_TOL {
        return Err(invalid("h", format!("summation-by-parts residual {r:.3e}")));
    }
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bcs_numerics::linalg::C64;

    #[test]
    fn constants_and_ramps() {
        let ops = sbp_first_derivative(11, 0.1).unwrap();
        let one = vec![C64::new(1.0, 0.0); 11];
        assert!(linalg::matvec(&ops.d1, &one).iter().all(|z| z.norm() == 0.0));
        let ramp: Vec<C64> = (0..11).map(|i| C64::new(i as f64 * 0.1, 0.0)).collect();
        assert!(linalg::matvec(&ops.d1, &ramp).iter().all(|z| (z - 1.0).norm() < 1e-12));
        assert!(ops.sbp_residual() <= 1e-14);
    }

    #[test]
    fn too_small() {
        assert!(sbp_first_derivative(2, 0.5).is_err());
    }
}
