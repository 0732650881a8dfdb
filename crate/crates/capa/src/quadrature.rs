//! Gauss-Legendre quadrature over the rectangular aperture, sampled channel
//! matrices, and the channel correlation matrix.
//!
//! Every aperture integral in the crate is evaluated as a weighted sum over
//! a tensor-product Gauss-Legendre grid. The correlation matrix
//! `R[k1][k2] = integral of h_k1^* h_k2 over the aperture` is the algebraic
//! input to every beamformer, so its accuracy is guarded by an
//! order-doubling refinement check rather than a fixed truth value.
//!
//! # Example
//!
//! ```
//! use capa::geometry::Aperture;
//! use capa::quadrature::{inner_product, tensor_grid};
//! use num_complex::Complex;
//!
//! let aperture = Aperture::new(0.5, 0.5).unwrap();
//! let grid = tensor_grid(&aperture, 4, 4).unwrap();
//! let ones = vec![Complex::new(1.0, 0.0); grid.num_nodes()];
//! let area = inner_product(&ones, &ones, &grid).unwrap();
//! assert!((area.re - 0.25).abs() < 1e-14);
//! ```

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{effective_channel, Aperture, UserLayout, WaveParams};
use crate::linalg::{hermitize, positive, CMat, CVec, C64};

/// Nodes and weights of the Gauss-Legendre rule on `[-1, 1]`.
///
/// Exact for polynomials up to degree `2n - 1`. Nodes are returned in
/// ascending order and are exactly symmetric about zero; weights are
/// positive and sum to 2.
pub fn legendre_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "quadrature order must be at least 1".into(),
        ));
    }
    // closed forms for the low orders, Newton iteration above them
    let tabulated: Option<(Vec<f64>, Vec<f64>)> = match n {
        1 => Some((vec![0.0], vec![2.0])),
        2 => {
            let x = 0.577_350_269_189_625_8;
            Some((vec![-x, x], vec![1.0, 1.0]))
        }
        3 => {
            let x = 0.774_596_669_241_483_4;
            Some((vec![-x, 0.0, x], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0]))
        }
        4 => {
            let x1 = 0.339_981_043_584_856_26;
            let x2 = 0.861_136_311_594_052_6;
            let w1 = 0.652_145_154_862_546_1;
            let w2 = 0.347_854_845_137_453_86;
            Some((vec![-x2, -x1, x1, x2], vec![w2, w1, w1, w2]))
        }
        5 => {
            let x1 = 0.538_469_310_105_683_1;
            let x2 = 0.906_179_845_938_664;
            let w0 = 0.568_888_888_888_888_9;
            let w1 = 0.478_628_670_499_366_47;
            let w2 = 0.236_926_885_056_189_08;
            Some((vec![-x2, -x1, 0.0, x1, x2], vec![w2, w1, w0, w1, w2]))
        }
        _ => None,
    };
    if let Some(rule) = tabulated {
        return Ok(rule);
    }

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n {
        // Chebyshev-style initial guess for the i-th root, descending in x
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 && p.abs() < 1e-15 {
                break;
            }
        }
        let (p, dp) = legendre_and_derivative(n, x);
        debug_assert!(p.abs() < 1e-13);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    // enforce the +/- symmetry of the rule exactly
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let m = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -m;
        nodes[j] = m;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for j in 2..=n {
        let jf = j as f64;
        let p_next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Tensor-product quadrature grid over a rectangular aperture.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<Vector3<f64>>,
    weights: Vec<f64>,
    order_x: usize,
    order_y: usize,
}

impl QuadratureGrid {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, n: usize) -> &Vector3<f64> {
        &self.nodes[n]
    }

    pub fn nodes(&self) -> &[Vector3<f64>] {
        &self.nodes
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.weights[n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> (usize, usize) {
        (self.order_x, self.order_y)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Product Gauss-Legendre grid on the aperture; weights carry the affine
/// Jacobian `(Lx/2)(Ly/2)` so they sum to the aperture area.
pub fn tensor_grid(aperture: &Aperture, order_x: usize, order_y: usize) -> Result<QuadratureGrid> {
    let (nx, wx) = legendre_rule(order_x)?;
    let (ny, wy) = legendre_rule(order_y)?;
    let hx = aperture.lx() / 2.0;
    let hy = aperture.ly() / 2.0;
    let mut nodes = Vec::with_capacity(order_x * order_y);
    let mut weights = Vec::with_capacity(order_x * order_y);
    for (xi, wxi) in nx.iter().zip(&wx) {
        for (yi, wyi) in ny.iter().zip(&wy) {
            nodes.push(Vector3::new(hx * xi, hy * yi, 0.0));
            weights.push(hx * hy * wxi * wyi);
        }
    }
    Ok(QuadratureGrid {
        nodes,
        weights,
        order_x,
        order_y,
    })
}

/// Weighted inner product `integral of u^*(r) v(r) over the aperture`,
/// conjugate-linear in `u`.
pub fn inner_product(u: &[C64], v: &[C64], grid: &QuadratureGrid) -> Result<C64> {
    let n = grid.num_nodes();
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "inner product over {} nodes got vectors of length {} and {}",
            n,
            u.len(),
            v.len()
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        acc += grid.weights[i] * u[i].conj() * v[i];
    }
    Ok(acc)
}

pub(crate) fn row_inner(h: &CMat, k1: usize, k2: usize, weights: &[f64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..h.ncols() {
        acc += weights[n] * h[(k1, n)].conj() * h[(k2, n)];
    }
    acc
}

/// Channel responses of all users sampled on a quadrature grid; row `k`
/// holds `h_k(r_n)`.
#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    h: CMat,
    grid: QuadratureGrid,
}

impl ChannelMatrix {
    /// Evaluate the effective channels of `layout` on `grid`.
    pub fn sample(layout: &UserLayout, wave: &WaveParams, grid: &QuadratureGrid) -> Result<Self> {
        let k = layout.num_users();
        let n = grid.num_nodes();
        let mut h = CMat::zeros(k, n);
        for ku in 0..k {
            for nn in 0..n {
                h[(ku, nn)] = effective_channel(grid.node(nn), ku, layout, wave)?;
            }
        }
        Ok(Self {
            h,
            grid: grid.clone(),
        })
    }

    /// Wrap externally supplied sampled functions (one row per user).
    pub fn from_rows(rows: Vec<Vec<C64>>, grid: &QuadratureGrid) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidParameter("need at least one row".into()));
        }
        let n = grid.num_nodes();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "rows must have length {n}"
            )));
        }
        let h = CMat::from_fn(k, n, |i, j| rows[i][j]);
        Ok(Self {
            h,
            grid: grid.clone(),
        })
    }

    pub fn num_users(&self) -> usize {
        self.h.nrows()
    }

    pub fn num_nodes(&self) -> usize {
        self.h.ncols()
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &CMat {
        &self.h
    }

    pub fn entry(&self, k: usize, n: usize) -> C64 {
        self.h[(k, n)]
    }

    /// Copy of row `k` as a plain vector of node samples.
    pub fn row(&self, k: usize) -> Vec<C64> {
        (0..self.h.ncols()).map(|n| self.h[(k, n)]).collect()
    }
}

/// Hermitian positive-definite channel correlation matrix
/// `R[k1][k2] = integral of h_k1^*(r) h_k2(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    r: CMat,
}

impl CorrelationMatrix {
    /// Correlation matrix of a sampled channel, Hermitian-symmetrized.
    pub fn from_channel(channel: &ChannelMatrix) -> Result<Self> {
        let k = channel.num_users();
        if channel
            .h
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "channel samples must be finite".into(),
            ));
        }
        let w = channel.grid.weights();
        let mut r = CMat::zeros(k, k);
        for k1 in 0..k {
            for k2 in k1..k {
                let v = row_inner(&channel.h, k1, k2, w);
                r[(k1, k2)] = v;
                if k2 != k1 {
                    r[(k2, k1)] = v.conj();
                }
            }
        }
        Self::from_matrix(r)
    }

    /// Wrap an externally built Gram matrix, enforcing Hermitian symmetry.
    pub fn from_matrix(mut r: CMat) -> Result<Self> {
        if r.nrows() != r.ncols() || r.nrows() == 0 {
            return Err(Error::DimensionMismatch(
                "correlation matrix must be square and non-empty".into(),
            ));
        }
        let scale = crate::linalg::max_abs(&r).max(f64::MIN_POSITIVE);
        let asym = crate::linalg::max_abs(&(&r - r.adjoint()));
        if asym > 1e-12 * scale {
            return Err(Error::InvalidParameter(format!(
                "matrix is not Hermitian: relative asymmetry {:.3e}",
                asym / scale
            )));
        }
        hermitize(&mut r);
        for k in 0..r.nrows() {
            let d = r[(k, k)];
            if !positive(d.re) {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry {k} must be positive, got {}",
                    d.re
                )));
            }
            r[(k, k)] = C64::new(d.re, 0.0);
        }
        Ok(Self { r })
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.r
    }

    pub fn entry(&self, k1: usize, k2: usize) -> C64 {
        self.r[(k1, k2)]
    }

    /// Channel gain `a_k`, the (real, positive) k-th diagonal entry.
    pub fn gain(&self, k: usize) -> f64 {
        self.r[(k, k)].re
    }

    pub fn gains(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.gain(k)).collect()
    }

    /// Leave-one-out pieces for user `k`: the principal submatrix with row
    /// and column `k` removed, and the cross-correlation column
    /// `[r_{1,k}, ..., r_{k-1,k}, r_{k+1,k}, ..., r_{K,k}]`.
    pub fn leave_one_out(&self, k: usize) -> (CMat, CVec) {
        let kk = self.dim();
        let others: Vec<usize> = (0..kk).filter(|&i| i != k).collect();
        let sub = CMat::from_fn(kk - 1, kk - 1, |i, j| self.r[(others[i], others[j])]);
        let cross = CVec::from_fn(kk - 1, |i, _| self.r[(others[i], k)]);
        (sub, cross)
    }
}

/// Squared correlation coefficient
/// `rho_{k1,k2} = |r_{k1,k2}|^2 / (a_k1 a_k2)`; 1 on the diagonal, in
/// `[0, 1)` off it when the channels are mutually non-parallel.
pub fn correlation_coefficient(r: &CorrelationMatrix, k1: usize, k2: usize) -> Result<f64> {
    let a1 = r.gain(k1);
    let a2 = r.gain(k2);
    if a1 <= 0.0 || a2 <= 0.0 {
        return Err(Error::InvalidParameter(
            "correlation coefficient undefined for zero channel gain".into(),
        ));
    }
    if k1 == k2 {
        return Ok(1.0);
    }
    Ok(r.entry(k1, k2).norm_sqr() / (a1 * a2))
}

/// Largest entry change between two correlation matrices, relative to the
/// max-norm of the first. Used by the order-doubling refinement guard.
pub fn max_rel_entry_diff(a: &CorrelationMatrix, b: &CorrelationMatrix) -> f64 {
    let scale = crate::linalg::max_abs(a.matrix()).max(f64::MIN_POSITIVE);
    crate::linalg::max_abs(&(a.matrix() - b.matrix())) / scale
}
