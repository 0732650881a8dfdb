//! Small complex linear-algebra helpers shared by the beamforming and
//! identity modules.
//!
//! Everything here operates on dense `nalgebra` matrices of `Complex<f64>`.
//! Hermitian positive-definite systems are factored with Cholesky; the
//! eigendecomposition goes through nalgebra's Hermitian tridiagonalization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Finite and strictly positive; rejects NaN and infinities.
pub(crate) fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Replace `m` by its Hermitian part `(m + mᴴ)/2`, removing rounding
/// asymmetry before factorization.
pub fn hermitize(m: &mut CMat) {
    let adj = m.adjoint();
    *m += adj;
    *m *= C64::new(0.5, 0.0);
}

/// Solve `a x = b` for Hermitian positive-definite `a`.
pub fn herm_solve(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() == 0 {
        return Ok(CMat::zeros(0, b.ncols()));
    }
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::RankDeficient("Cholesky factorization failed".into()))?;
    Ok(chol.solve(b))
}

/// Solve `a x = b` for a single right-hand side.
pub fn herm_solve_vec(a: &CMat, b: &CVec) -> Result<CVec> {
    if a.nrows() == 0 {
        return Ok(CVec::zeros(0));
    }
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::RankDeficient("Cholesky factorization failed".into()))?;
    Ok(chol.solve(b))
}

/// Invert a Hermitian positive-definite matrix via Cholesky.
pub fn herm_inverse(a: &CMat) -> Result<CMat> {
    if a.nrows() == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::RankDeficient("Cholesky factorization failed".into()))?;
    let mut inv = chol.inverse();
    hermitize(&mut inv);
    Ok(inv)
}

/// Eigendecomposition of a Hermitian matrix. Returns `(u, lambda)` with
/// `a = u diag(lambda) uᴴ`; eigenvalues are real and sorted ascending.
pub fn herm_eigen(a: &CMat) -> Result<(CMat, Vec<f64>)> {
    if a.nrows() == 0 {
        return Ok((CMat::zeros(0, 0), Vec::new()));
    }
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lambda: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if lambda.iter().any(|l| !l.is_finite()) {
        return Err(Error::RankDeficient("non-finite eigenvalues".into()));
    }
    let n = a.nrows();
    let u = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((u, lambda))
}

/// Spectral condition number `λ_max / λ_min` of a Hermitian matrix.
/// Returns `f64::INFINITY` when the smallest eigenvalue is not positive.
pub fn condition_number(a: &CMat) -> Result<f64> {
    let (_, lambda) = herm_eigen(a)?;
    let min = lambda.first().copied().unwrap_or(0.0);
    let max = lambda.last().copied().unwrap_or(0.0);
    if min <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Principal angle between the complex lines spanned by `a` and `b`, in
/// radians.
///
/// Computed from the projection residual (`sin` of the angle) rather than
/// from the normalized inner product, so angles far below `sqrt(eps)` are
/// still resolved.
pub fn column_angle(a: &CVec, b: &CVec) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let coef = b.dotc(a) / C64::new(nb * nb, 0.0);
    let resid = a - b * coef;
    let s = (resid.norm() / na).min(1.0);
    s.asin()
}
