use faer::Side;

use crate::linalg::{self, CMat, C64};
use crate::{NumericsError, Result};

const HERMITIAN_RTOL: f64 = 1e-12;

/// Hermitian positive-definite inner-product matrix with a cached factor `F`, `F^H F = G`.
#[derive(Debug, Clone)]
pub struct HermitianGram {
    matrix: CMat,
    factor: CMat,
    factor_inv: CMat,
}

impl HermitianGram {
    pub fn new(matrix: CMat) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(NumericsError::DimensionMismatch(format!(
                "Gram must be square, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        if !linalg::all_finite(&matrix) {
            return Err(NumericsError::InvalidData("Gram has non-finite entries".into()));
        }
        let scale = linalg::max_abs(&matrix);
        let asym = linalg::max_abs(&(&matrix - matrix.adjoint()));
        if asym > HERMITIAN_RTOL * scale {
            return Err(NumericsError::NotPositiveDefinite(format!(
                "asymmetry {asym:.3e} exceeds tolerance"
            )));
        }
        if n == 0 {
            return Ok(Self { matrix, factor: linalg::zeros(0, 0), factor_inv: linalg::zeros(0, 0) });
        }
        let sym = linalg::scale(&(&matrix + matrix.adjoint()), C64::new(0.5, 0.0));
        let llt = sym
            .llt(Side::Lower)
            .map_err(|e| NumericsError::NotPositiveDefinite(format!("{e:?}")))?;
        let factor = llt.L().adjoint().to_owned();
        let mut factor_inv = linalg::identity(n);
        factor
            .as_ref()
            .solve_upper_triangular_in_place(factor_inv.as_mut());
        let recon = factor.adjoint() * &factor;
        if linalg::max_abs(&(&recon - &matrix)) > HERMITIAN_RTOL * scale {
            return Err(NumericsError::NotPositiveDefinite("factor does not reproduce Gram".into()));
        }
        Ok(Self { matrix, factor, factor_inv })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: linalg::identity(n), factor: linalg::identity(n), factor_inv: linalg::identity(n) }
    }

    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(NumericsError::NotPositiveDefinite(format!("diagonal weight {w}")));
        }
        let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
        let inv: Vec<f64> = sq.iter().map(|s| 1.0 / s).collect();
        Ok(Self {
            matrix: linalg::diag_real(weights),
            factor: linalg::diag_real(&sq),
            factor_inv: linalg::diag_real(&inv),
        })
    }

    pub fn block_diag(blocks: &[&HermitianGram]) -> Self {
        let m: Vec<&CMat> = blocks.iter().map(|b| &b.matrix).collect();
        let f: Vec<&CMat> = blocks.iter().map(|b| &b.factor).collect();
        let fi: Vec<&CMat> = blocks.iter().map(|b| &b.factor_inv).collect();
        Self {
            matrix: linalg::block_diag(&m),
            factor: linalg::block_diag(&f),
            factor_inv: linalg::block_diag(&fi),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn factor(&self) -> &CMat {
        &self.factor
    }

    pub fn factor_inv(&self) -> &CMat {
        &self.factor_inv
    }

    /// `⟨x, y⟩ = y^H G x`.
    pub fn inner(&self, x: &[C64], y: &[C64]) -> C64 {
        let gx = linalg::matvec(&self.matrix, x);
        gx.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm_sq(&self, x: &[C64]) -> f64 {
        self.inner(x, x).re.max(0.0)
    }

    /// Adjoint of `t: (in) -> (out)` with respect to the two Grams: `G_in^{-1} t^H G_out`.
    pub fn adjoint_between(t: &CMat, gram_out: &HermitianGram, gram_in: &HermitianGram) -> CMat {
        let fi = &gram_in.factor_inv;
        let ginv = fi * fi.adjoint();
        &ginv * (t.adjoint() * &gram_out.matrix)
    }

    /// `F T F^{-1}`: the matrix of an operator on this space in orthonormal coordinates.
    pub fn similarity(&self, t: &CMat) -> CMat {
        &self.factor * t * &self.factor_inv
    }
}

impl PartialEq for HermitianGram {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

/// Largest singular value of `F_out T F_in^{-1}`.
pub fn weighted_operator_norm(t: &CMat, gram_out: &HermitianGram, gram_in: &HermitianGram) -> Result<f64> {
    if t.nrows() != gram_out.dim() || t.ncols() != gram_in.dim() {
        return Err(NumericsError::DimensionMismatch(format!(
            "operator is {}x{}, Grams are {} and {}",
            t.nrows(),
            t.ncols(),
            gram_out.dim(),
            gram_in.dim()
        )));
    }
    linalg::spectral_norm(&(&gram_out.factor * t * &gram_in.factor_inv))
}

/// Smallest eigenvalue of the Hermitian part of `h` as an operator on the Gram space,
/// i.e. the infimum of `Re⟨Hu,u⟩/⟨u,u⟩`.
pub fn hermitian_min_eig(h: &CMat, gram: &HermitianGram) -> Result<f64> {
    if h.nrows() != gram.dim() || h.ncols() != gram.dim() {
        return Err(NumericsError::DimensionMismatch(format!(
            "operator is {}x{}, Gram is {}",
            h.nrows(),
            h.ncols(),
            gram.dim()
        )));
    }
    let e = linalg::hermitian_part_eigenvalues(&gram.similarity(h))?;
    Ok(e.first().copied().unwrap_or(f64::INFINITY))
}
