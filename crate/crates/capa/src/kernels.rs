//! Finite-rank perturbations of the identity operator on the aperture and
//! their exact composition algebra.
//!
//! All operators of interest here have the form
//!
//! ```text
//! K(r, r') = d * delta(r - r') + phi(r) * S * phi^H(r')
//! ```
//!
//! with `d` either 0 or 1, `phi(r)` a row of `K'` basis functions, and `S`
//! a `K' x K'` coefficient matrix. Composition stays in this family:
//!
//! ```text
//! (K1 o K2)(r, r') = d1 d2 * delta + phi (d1 S2 + d2 S1 + S1 Psi S2) phi^H
//! ```
//!
//! where `Psi` is the basis Gram matrix. The Dirac delta is therefore never
//! discretized — every operator identity reduces to exact `K' x K'` matrix
//! algebra, which is what makes the proofs behind the MMSE beamformer
//! machine-checkable at double precision.
//!
//! Given `Psi = U diag(lambda) U^H`, the covariance operator
//! `C = delta + phi phi^H` has an explicit square root, inverse square
//! root, and inverse within the family, with spectra
//!
//! ```text
//! sqrt:     (1 + sqrt(1 + lambda)) / lambda
//! inv sqrt: (1 + sqrt(1 + lambda)) / (lambda * sqrt(1 + lambda))
//! inverse:  (I + Psi)^-1
//! ```
//!
//! (the first two are the coefficients of `delta - phi M phi^H` forms).

use crate::error::{Error, Result};
use crate::linalg::{herm_eigen, herm_inverse, hermitize, max_abs, CMat, CVec, C64};
use crate::quadrature::QuadratureGrid;

/// A set of sampled basis functions together with their weighted Gram
/// matrix; all kernels over the same basis compose exactly.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    phi: CMat, // K' x N, row j holds basis function j at every node
    gram: CMat,
    weights: Vec<f64>,
}

impl KernelBasis {
    /// Build a basis from sampled rows. An empty basis (zero functions) is
    /// allowed and represents the pure-delta family.
    pub fn new(phi: CMat, grid: &QuadratureGrid) -> Result<Self> {
        if phi.ncols() != grid.num_nodes() && phi.nrows() > 0 {
            return Err(Error::DimensionMismatch(format!(
                "basis sampled on {} nodes but grid has {}",
                phi.ncols(),
                grid.num_nodes()
            )));
        }
        let gram = gram_matrix(&phi, grid)?;
        Ok(Self {
            phi,
            gram,
            weights: grid.weights().to_vec(),
        })
    }

    pub fn from_rows(rows: &[Vec<C64>], grid: &QuadratureGrid) -> Result<Self> {
        let k = rows.len();
        let n = grid.num_nodes();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "basis rows must have length {n}"
            )));
        }
        let phi = CMat::from_fn(k, n, |i, j| rows[i][j]);
        Self::new(phi, grid)
    }

    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    pub fn num_nodes(&self) -> usize {
        self.phi.ncols()
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn phi(&self) -> &CMat {
        &self.phi
    }

    /// Weighted moments `m_j = <phi_j, f>` of a sampled function.
    pub fn moments(&self, f: &[C64]) -> Result<CVec> {
        if self.dim() > 0 && f.len() != self.num_nodes() {
            return Err(Error::DimensionMismatch(format!(
                "function sampled on {} nodes, basis on {}",
                f.len(),
                self.num_nodes()
            )));
        }
        Ok(CVec::from_fn(self.dim(), |j, _| {
            let mut acc = C64::new(0.0, 0.0);
            for (n, fv) in f.iter().enumerate() {
                acc += self.weights[n] * self.phi[(j, n)].conj() * fv;
            }
            acc
        }))
    }
}

/// Weighted Gram matrix of sampled rows, Hermitian-symmetrized.
pub fn gram_matrix(phi: &CMat, grid: &QuadratureGrid) -> Result<CMat> {
    let k = phi.nrows();
    if k == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    if phi.ncols() != grid.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "rows sampled on {} nodes but grid has {}",
            phi.ncols(),
            grid.num_nodes()
        )));
    }
    let w = grid.weights();
    let mut gram = CMat::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = crate::quadrature::row_inner(phi, i, j, w);
            gram[(i, j)] = v;
            if j != i {
                gram[(j, i)] = v.conj();
            }
        }
    }
    hermitize(&mut gram);
    // rank check: the kernel algebra assumes linearly independent rows
    let (_, lambda) = herm_eigen(&gram)?;
    let max = lambda.last().copied().unwrap_or(0.0);
    let min = lambda.first().copied().unwrap_or(0.0);
    if min <= 1e-13 * max.max(f64::MIN_POSITIVE) {
        return Err(Error::RankDeficient(format!(
            "basis Gram matrix eigenvalues span [{min:.3e}, {max:.3e}]"
        )));
    }
    Ok(gram)
}

/// One member of the kernel family `d * delta + phi S phi^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelOperator {
    delta: bool,
    smooth: CMat,
}

impl KernelOperator {
    /// The identity kernel `delta(r - r')`.
    pub fn identity(dim: usize) -> Self {
        Self {
            delta: true,
            smooth: CMat::zeros(dim, dim),
        }
    }

    /// Kernel in the `delta - phi C phi^H` convention used by the inverse
    /// and square-root families.
    pub fn from_coeff(coeff: &CMat) -> Self {
        Self {
            delta: true,
            smooth: -coeff,
        }
    }

    /// The covariance kernel `delta + phi phi^H`.
    pub fn covariance(dim: usize) -> Self {
        Self {
            delta: true,
            smooth: CMat::identity(dim, dim),
        }
    }

    /// A pure smooth kernel `phi M phi^H` with no delta part (projection
    /// kernels live here).
    pub fn smooth_only(m: CMat) -> Self {
        Self {
            delta: false,
            smooth: m,
        }
    }

    pub fn has_delta(&self) -> bool {
        self.delta
    }

    pub fn smooth(&self) -> &CMat {
        &self.smooth
    }

    /// Coefficient in the `delta - phi C phi^H` convention (negated smooth
    /// part); only meaningful for kernels that carry the delta.
    pub fn coeff(&self) -> CMat {
        -&self.smooth
    }

    pub fn dim(&self) -> usize {
        self.smooth.nrows()
    }

    /// Max-norm distance to another kernel of the same family. Infinite
    /// when the delta parts differ.
    pub fn distance(&self, other: &KernelOperator) -> f64 {
        if self.delta != other.delta {
            return f64::INFINITY;
        }
        max_abs(&(&self.smooth - &other.smooth))
    }
}

/// Exact composition `(a o b)(r1, r2) = integral a(r1, r) b(r, r2) dr`;
/// only the Gram matrix of the shared basis enters.
pub fn compose(gram: &CMat, a: &KernelOperator, b: &KernelOperator) -> Result<KernelOperator> {
    let k = gram.nrows();
    if a.dim() != k || b.dim() != k {
        return Err(Error::DimensionMismatch(format!(
            "kernels of dim {} and {} over a {k}-function basis",
            a.dim(),
            b.dim()
        )));
    }
    let mut smooth = &a.smooth * gram * &b.smooth;
    if a.delta {
        smooth += &b.smooth;
    }
    if b.delta {
        smooth += &a.smooth;
    }
    Ok(KernelOperator {
        delta: a.delta && b.delta,
        smooth,
    })
}

/// Apply a kernel to a sampled function:
/// `(K f)(r_n) = d f(r_n) + phi(r_n) S <phi, f>`.
pub fn apply(basis: &KernelBasis, op: &KernelOperator, f: &[C64]) -> Result<Vec<C64>> {
    if op.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "kernel dim {} over a {}-function basis",
            op.dim(),
            basis.dim()
        )));
    }
    let m = basis.moments(f)?;
    let v = &op.smooth * m;
    let mut out: Vec<C64> = if op.delta {
        f.to_vec()
    } else {
        vec![C64::new(0.0, 0.0); f.len()]
    };
    for j in 0..basis.dim() {
        let vj = v[j];
        if vj.norm_sqr() == 0.0 {
            continue;
        }
        for (n, o) in out.iter_mut().enumerate() {
            *o += basis.phi()[(j, n)] * vj;
        }
    }
    Ok(out)
}

/// Pointwise value of the smooth part, `phi(r_i) S phi^H(r_j)`.
pub fn eval_smooth(basis: &KernelBasis, op: &KernelOperator, i: usize, j: usize) -> C64 {
    let k = basis.dim();
    let phi = basis.phi();
    let mut acc = C64::new(0.0, 0.0);
    for j1 in 0..k {
        let mut inner = C64::new(0.0, 0.0);
        for j2 in 0..k {
            inner += op.smooth[(j1, j2)] * phi[(j2, j)].conj();
        }
        acc += phi[(j1, i)] * inner;
    }
    acc
}

/// Eigen data of a basis Gram matrix together with the derived coefficient
/// matrices of the square-root, inverse-square-root, and inverse kernels of
/// the covariance operator `delta + phi phi^H`.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    pub eigenvectors: CMat,
    pub eigenvalues: Vec<f64>,
    /// Coefficient of the square-root kernel (in `delta - phi M phi^H`).
    pub sqrt_coeff: CMat,
    /// Coefficient of the inverse-square-root (whitening) kernel.
    pub inv_sqrt_coeff: CMat,
    /// Coefficient of the inverse kernel, `(I + Psi)^-1`.
    pub inverse_coeff: CMat,
}

impl OperatorFamily {
    pub fn sqrt_kernel(&self) -> KernelOperator {
        KernelOperator::from_coeff(&self.sqrt_coeff)
    }

    pub fn inv_sqrt_kernel(&self) -> KernelOperator {
        KernelOperator::from_coeff(&self.inv_sqrt_coeff)
    }

    pub fn inverse_kernel(&self) -> KernelOperator {
        KernelOperator::from_coeff(&self.inverse_coeff)
    }

    pub fn covariance_kernel(&self) -> KernelOperator {
        KernelOperator::covariance(self.sqrt_coeff.nrows())
    }
}

/// Build the operator family from a Hermitian positive-definite Gram
/// matrix. The spectra divide by the eigenvalues, so positivity is checked
/// first.
pub fn operator_family(gram: &CMat) -> Result<OperatorFamily> {
    let n = gram.nrows();
    if n == 0 {
        return Ok(OperatorFamily {
            eigenvectors: CMat::zeros(0, 0),
            eigenvalues: Vec::new(),
            sqrt_coeff: CMat::zeros(0, 0),
            inv_sqrt_coeff: CMat::zeros(0, 0),
            inverse_coeff: CMat::zeros(0, 0),
        });
    }
    let (u, lambda) = herm_eigen(gram)?;
    if lambda.iter().any(|l| *l <= 0.0) {
        return Err(Error::RankDeficient(format!(
            "Gram matrix is not positive definite (min eigenvalue {:.3e})",
            lambda.first().copied().unwrap_or(0.0)
        )));
    }
    let rebuild = |f: &dyn Fn(f64) -> f64| -> CMat {
        let d = CMat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(f(lambda[i]), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let mut m = &u * d * u.adjoint();
        hermitize(&mut m);
        m
    };
    let sqrt_coeff = rebuild(&|l| (1.0 + (1.0 + l).sqrt()) / l);
    let inv_sqrt_coeff = rebuild(&|l| (1.0 + (1.0 + l).sqrt()) / (l * (1.0 + l).sqrt()));
    let eye = CMat::identity(n, n);
    let inverse_coeff = herm_inverse(&(gram + eye))?;
    Ok(OperatorFamily {
        eigenvectors: u,
        eigenvalues: lambda,
        sqrt_coeff,
        inv_sqrt_coeff,
        inverse_coeff,
    })
}
