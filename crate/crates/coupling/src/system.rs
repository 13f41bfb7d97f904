use bcs_numerics::json;
use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::random::{complex_normal_vec, seeded_rng};
use bcs_numerics::{HermitianGram, Lu};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{CouplingError, Result};

const PASSIVITY_TOL: f64 = 1e-12;
const PASSIVITY_TRIALS: usize = 200;
const PASSIVITY_SEED: u64 = 0x5eed_0002;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SystemParts {
    #[serde(with = "json::matrix")]
    a: CMat,
    #[serde(with = "json::matrix")]
    b: CMat,
    #[serde(with = "json::matrix")]
    c: CMat,
    #[serde(with = "json::matrix")]
    d: CMat,
    #[serde(with = "json::gram")]
    x_gram: HermitianGram,
    #[serde(with = "json::gram")]
    u_gram: HermitianGram,
}

/// `x' = A x + B u`, `y = C x + D u`, impedance passive in the given Grams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemParts", into = "SystemParts")]
pub struct LinearSystemBlock {
    a: CMat,
    b: CMat,
    c: CMat,
    d: CMat,
    x_gram: HermitianGram,
    u_gram: HermitianGram,
}

impl TryFrom<SystemParts> for LinearSystemBlock {
    type Error = CouplingError;
    fn try_from(p: SystemParts) -> Result<Self> {
        Self::new(p.a, p.b, p.c, p.d, p.x_gram, p.u_gram)
    }
}

impl From<LinearSystemBlock> for SystemParts {
    fn from(s: LinearSystemBlock) -> Self {
        SystemParts { a: s.a, b: s.b, c: s.c, d: s.d, x_gram: s.x_gram, u_gram: s.u_gram }
    }
}

impl LinearSystemBlock {
    pub fn new(a: CMat, b: CMat, c: CMat, d: CMat, x_gram: HermitianGram, u_gram: HermitianGram) -> Result<Self> {
        let (n, m) = (x_gram.dim(), u_gram.dim());
        for (name, mat, want) in [("A", &a, (n, n)), ("B", &b, (n, m)), ("C", &c, (m, n)), ("D", &d, (m, m))] {
            if (mat.nrows(), mat.ncols()) != want {
                return Err(CouplingError::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {}x{}",
                    mat.nrows(),
                    mat.ncols(),
                    want.0,
                    want.1
                )));
            }
            if !linalg::all_finite(mat) {
                return Err(CouplingError::NonFinite(name.into()));
            }
        }
        let sys = Self { a, b, c, d, x_gram, u_gram };
        let residual = sys.passivity_residual(PASSIVITY_TRIALS, &mut seeded_rng(PASSIVITY_SEED));
        if residual > PASSIVITY_TOL {
            return Err(CouplingError::PassivityViolation { which: "linear system".into(), residual });
        }
        Ok(sys)
    }

    /// `C = B^*` and `D = 0`.
    pub fn collocated(a: CMat, b: CMat, x_gram: HermitianGram, u_gram: HermitianGram) -> Result<Self> {
        let c = HermitianGram::adjoint_between(&b, &x_gram, &u_gram);
        let m = u_gram.dim();
        Self::new(a, b, c, linalg::zeros(m, m), x_gram, u_gram)
    }

    /// Largest `Re⟨Ax+Bu,x⟩ - Re⟨Cx+Du,u⟩` over random pairs, per unit `‖x‖²+‖u‖²`.
    pub fn passivity_residual<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..trials {
            let x = complex_normal_vec(rng, self.n());
            let u = complex_normal_vec(rng, self.m());
            let ax = linalg::matvec(&self.a, &x);
            let bu = linalg::matvec(&self.b, &u);
            let cx = linalg::matvec(&self.c, &x);
            let du = linalg::matvec(&self.d, &u);
            let lhs: Vec<C64> = ax.iter().zip(&bu).map(|(p, q)| p + q).collect();
            let out: Vec<C64> = cx.iter().zip(&du).map(|(p, q)| p + q).collect();
            let r = self.x_gram.inner(&lhs, &x).re - self.u_gram.inner(&out, &u).re;
            let scale = self.x_gram.norm_sq(&x) + self.u_gram.norm_sq(&u);
            worst = worst.max(r / scale);
        }
        if trials == 0 {
            0.0
        } else {
            worst
        }
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    pub fn m(&self) -> usize {
        self.b.ncols()
    }
    pub fn a(&self) -> &CMat {
        &self.a
    }
    pub fn b(&self) -> &CMat {
        &self.b
    }
    pub fn c(&self) -> &CMat {
        &self.c
    }
    pub fn d(&self) -> &CMat {
        &self.d
    }
    pub fn x_gram(&self) -> &HermitianGram {
        &self.x_gram
    }
    pub fn u_gram(&self) -> &HermitianGram {
        &self.u_gram
    }

    pub fn resolvent_factor(&self, lambda: C64) -> Result<Lu> {
        let mut m = linalg::scale(&self.a, C64::new(-1.0, 0.0));
        for i in 0..self.n() {
            m[(i, i)] += lambda;
        }
        Ok(Lu::factor(&m)?)
    }

    /// `C(λ-A)^{-1}B + D`.
    pub fn transfer(&self, lambda: C64) -> Result<CMat> {
        let lu = self.resolvent_factor(lambda)?;
        Ok(&self.c * lu.solve(&self.b) + &self.d)
    }
}
