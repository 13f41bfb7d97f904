use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::{NumericsError, Result};

pub type C64 = Complex64;
pub type CMat = Mat<C64>;

/// Relative pivot threshold below which a factorization is declared singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-14;

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn from_real(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> CMat {
    Mat::from_fn(rows, cols, |i, j| C64::new(f(i, j), 0.0))
}

pub fn diag_real(d: &[f64]) -> CMat {
    from_real(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
}

pub fn column(x: &[C64]) -> CMat {
    Mat::from_fn(x.len(), 1, |i, _| x[i])
}

pub fn column_to_vec(m: &CMat, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn rows(a: &CMat, start: usize, count: usize) -> CMat {
    a.as_ref().submatrix(start, 0, count, a.ncols()).to_owned()
}

pub fn cols(a: &CMat, start: usize, count: usize) -> CMat {
    a.as_ref().submatrix(0, start, a.nrows(), count).to_owned()
}

pub fn vstack(blocks: &[&CMat]) -> CMat {
    let ncols = blocks.first().map_or(0, |b| b.ncols());
    let nrows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(nrows, ncols);
    let mut r0 = 0;
    for b in blocks {
        assert_eq!(b.ncols(), ncols, "vstack column mismatch");
        out.as_mut().submatrix_mut(r0, 0, b.nrows(), ncols).copy_from(b.as_ref());
        r0 += b.nrows();
    }
    out
}

pub fn hstack(blocks: &[&CMat]) -> CMat {
    let nrows = blocks.first().map_or(0, |b| b.nrows());
    let ncols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(nrows, ncols);
    let mut c0 = 0;
    for b in blocks {
        assert_eq!(b.nrows(), nrows, "hstack row mismatch");
        out.as_mut().submatrix_mut(0, c0, nrows, b.ncols()).copy_from(b.as_ref());
        c0 += b.ncols();
    }
    out
}

pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let nrows = blocks.iter().map(|b| b.nrows()).sum();
    let ncols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(nrows, ncols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        out.as_mut()
            .submatrix_mut(r0, c0, b.nrows(), b.ncols())
            .copy_from(b.as_ref());
        r0 += b.nrows();
        c0 += b.ncols();
    }
    out
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn frobenius(a: &CMat) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// Frobenius norm of `a - b` relative to the Frobenius norm of `b` (absolute when `b = 0`).
pub fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let d = frobenius(&(a - b));
    let nb = frobenius(b);
    if nb > 0.0 {
        d / nb
    } else {
        d
    }
}

pub fn matvec(a: &CMat, x: &[C64]) -> Vec<C64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![C64::new(0.0, 0.0); a.nrows()];
    for (j, xj) in x.iter().enumerate() {
        if *xj == C64::new(0.0, 0.0) {
            continue;
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += a[(i, j)] * xj;
        }
    }
    y
}

pub fn all_finite(a: &CMat) -> bool {
    (0..a.ncols()).all(|j| (0..a.nrows()).all(|i| a[(i, j)].re.is_finite() && a[(i, j)].im.is_finite()))
}

/// LU factorization with partial pivoting and a relative pivot test.
pub struct Lu {
    lu: PartialPivLu<C64>,
    n: usize,
}

impl std::fmt::Debug for Lu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lu").field("n", &self.n).finish_non_exhaustive()
    }
}

impl Lu {
    pub fn factor(a: &CMat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(NumericsError::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                n,
                a.ncols()
            )));
        }
        let mut scale = 0.0f64;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| a[(i, j)].norm()).sum();
            scale = scale.max(row);
        }
        let threshold = SINGULAR_PIVOT_RTOL * scale;
        if n > 0 && scale == 0.0 {
            return Err(NumericsError::SingularMatrix { pivot: 0.0, threshold });
        }
        let lu = a.partial_piv_lu();
        let u = lu.U();
        let mut pivot = f64::INFINITY;
        for k in 0..n {
            pivot = pivot.min(u[(k, k)].norm());
        }
        if n > 0 && !(pivot >= threshold) {
            return Err(NumericsError::SingularMatrix { pivot, threshold });
        }
        Ok(Lu { lu, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &CMat) -> CMat {
        assert_eq!(b.nrows(), self.n, "right-hand side has wrong row count");
        let mut x = b.clone();
        self.lu.solve_in_place(x.as_mut());
        x
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        column_to_vec(&self.solve(&column(b)), 0)
    }
}

pub fn solve_linear(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() != b.nrows() {
        return Err(NumericsError::DimensionMismatch(format!(
            "A is {}x{}, B has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    Ok(Lu::factor(a)?.solve(b))
}

pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values()
        .map_err(|e| NumericsError::Decomposition(format!("{e:?}")))
}

/// Largest singular value.
pub fn spectral_norm(a: &CMat) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

pub fn smallest_singular_value(a: &CMat) -> Result<f64> {
    Ok(singular_values(a)?.last().copied().unwrap_or(0.0))
}

pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    if a.nrows() != a.ncols() {
        return Err(NumericsError::DimensionMismatch("eigenvalues of non-square matrix".into()));
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.eigenvalues()
        .map_err(|e| NumericsError::Decomposition(format!("{e:?}")))
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_part_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() {
        return Err(NumericsError::DimensionMismatch("Hermitian part of non-square matrix".into()));
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let h = scale(&(a + a.adjoint()), C64::new(0.5, 0.0));
    h.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| NumericsError::Decomposition(format!("{e:?}")))
}
