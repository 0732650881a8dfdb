//! The three linear receive beamformers in weight-matrix form, their
//! reduced per-user forms, and the post-combining scalar filters.
//!
//! Every beamformer is a weighted sum of the users' channel responses,
//! `w_k(r) = sum_k' A[k',k] h_k'(r)`, so a scheme is fully described by its
//! K x K weight matrix:
//!
//! * MRC:  `A = I`
//! * ZF:   `A = R^-1`
//! * MMSE: `A = (I + P R)^-1` with `P = diag(P_k / sigma^2)`
//!
//! The reduced forms express the same beamformers (up to a positive scale
//! that cancels in any SINR) with coefficient 1 on the user's own channel:
//! `w_k = h_k - h_others * M^-1 * r_k` with `M = R_k` for ZF and
//! `M = P_k^-1 + R_k` for MMSE.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::UserLayout;
use crate::linalg::{
    condition_number, herm_inverse, herm_solve_vec, hermitize, max_abs, positive, CMat, CVec, C64,
};
use crate::quadrature::{ChannelMatrix, CorrelationMatrix};

/// Condition-number ceiling above which the correlation matrix is treated
/// as violating the non-parallel-channels assumption.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Linear receive beamforming scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Mrc,
    Zf,
    Mmse,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Mrc, Scheme::Zf, Scheme::Mmse];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Mrc => "mrc",
            Scheme::Zf => "zf",
            Scheme::Mmse => "mmse",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mrc" => Ok(Scheme::Mrc),
            "zf" => Ok(Scheme::Zf),
            "mmse" => Ok(Scheme::Mmse),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (expected mrc, zf, or mmse)"
            ))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-user power-to-noise ratios `p_k = P_k / sigma^2` and their diagonal
/// matrix views.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    ratios: Vec<f64>,
}

impl PowerProfile {
    pub fn new(ratios: Vec<f64>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::InvalidParameter("need at least one user".into()));
        }
        if !ratios.iter().all(|p| positive(*p)) {
            return Err(Error::InvalidParameter(
                "power ratios must be positive and finite".into(),
            ));
        }
        Ok(Self { ratios })
    }

    pub fn uniform(ratio: f64, users: usize) -> Result<Self> {
        Self::new(vec![ratio; users])
    }

    pub fn from_layout(layout: &UserLayout) -> Result<Self> {
        Self::new(layout.power_ratios())
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    pub fn ratio(&self, k: usize) -> f64 {
        self.ratios[k]
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    /// All ratios multiplied by `factor`; used for SNR-scale sweeps.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.ratios.iter().map(|p| p * factor).collect())
    }

    /// Ratios of the interferers of user `k`, in leave-one-out order.
    pub fn leave_one_out(&self, k: usize) -> Vec<f64> {
        self.ratios
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, p)| *p)
            .collect()
    }

    pub fn diag(&self) -> CMat {
        CMat::from_fn(self.len(), self.len(), |i, j| {
            if i == j {
                C64::new(self.ratios[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn diag_sqrt(&self) -> CMat {
        CMat::from_fn(self.len(), self.len(), |i, j| {
            if i == j {
                C64::new(self.ratios[i].sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn diag_inv_sqrt(&self) -> CMat {
        CMat::from_fn(self.len(), self.len(), |i, j| {
            if i == j {
                C64::new(1.0 / self.ratios[i].sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// K x K beamforming weight matrix; column `k` holds the expansion
/// coefficients of `w_k` over the users' channels.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    a: CMat,
    scheme: Scheme,
}

impl WeightMatrix {
    pub fn from_matrix(a: CMat, scheme: Scheme) -> Self {
        Self { a, scheme }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.a
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.a[(row, col)]
    }

    pub fn column(&self, k: usize) -> CVec {
        CVec::from_fn(self.a.nrows(), |i, _| self.a[(i, k)])
    }
}

/// MRC weights: the identity matrix (each beamformer is the user's own
/// channel).
pub fn mrc_weights(users: usize) -> WeightMatrix {
    WeightMatrix::from_matrix(CMat::identity(users, users), Scheme::Mrc)
}

/// ZF weights `A = R^-1`, rejecting correlation matrices whose condition
/// number exceeds [`CONDITION_LIMIT`].
pub fn zf_weights(r: &CorrelationMatrix) -> Result<WeightMatrix> {
    let cond = condition_number(r.matrix())?;
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::AssumptionViolation(format!(
            "correlation matrix condition number {cond:.3e} exceeds {CONDITION_LIMIT:.0e}"
        )));
    }
    let inv = herm_inverse(r.matrix())?;
    Ok(WeightMatrix::from_matrix(inv, Scheme::Zf))
}

/// MMSE weights `A = (I + P R)^-1`, computed through the Hermitian form
/// `P^-1/2 (I + P^1/2 R P^1/2)^-1 P^1/2`.
pub fn mmse_weights(r: &CorrelationMatrix, p: &PowerProfile) -> Result<WeightMatrix> {
    let k = r.dim();
    if p.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{} power ratios for a {k}-user correlation matrix",
            p.len()
        )));
    }
    let ps = p.diag_sqrt();
    let mut inner = CMat::identity(k, k) + &ps * r.matrix() * &ps;
    hermitize(&mut inner);
    let inv = herm_inverse(&inner)?;
    // (I + P R)^-1 = P^1/2 (I + P^1/2 R P^1/2)^-1 P^-1/2
    let a = ps * inv * p.diag_inv_sqrt();
    // the system (I + P R) A = I has an exact solution for PD R; a large
    // residual here means the factorization itself broke down
    let system = CMat::identity(k, k) + p.diag() * r.matrix();
    let resid = max_abs(&(&system * &a - CMat::identity(k, k)));
    let scale = max_abs(&system).max(1.0);
    if resid > 1e-8 * scale {
        return Err(Error::RankDeficient(format!(
            "MMSE weight solve residual {resid:.3e} (scale {scale:.3e})"
        )));
    }
    Ok(WeightMatrix::from_matrix(a, Scheme::Mmse))
}

fn check_user_index(k: usize, users: usize) -> Result<()> {
    if k >= users {
        return Err(Error::InvalidParameter(format!(
            "user index {k} out of range for {users} users"
        )));
    }
    Ok(())
}

/// Reduced ZF beamformer for user `k`: coefficient 1 on the user's own
/// channel and `-R_k^-1 r_k` on the interferers. Proportional to column `k`
/// of `R^-1`.
pub fn reduced_zf_coefficients(k: usize, r: &CorrelationMatrix) -> Result<CVec> {
    check_user_index(k, r.dim())?;
    let (sub, cross) = r.leave_one_out(k);
    let sol = herm_solve_vec(&sub, &cross)?;
    Ok(embed_reduced(k, r.dim(), &sol))
}

/// Reduced MMSE beamformer for user `k`: coefficient 1 on the user's own
/// channel and `-(P_k^-1 + R_k)^-1 r_k` on the interferers. Proportional to
/// column `k` of `(I + P R)^-1`.
pub fn reduced_mmse_coefficients(
    k: usize,
    r: &CorrelationMatrix,
    p: &PowerProfile,
) -> Result<CVec> {
    check_user_index(k, r.dim())?;
    if p.len() != r.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} power ratios for a {}-user correlation matrix",
            p.len(),
            r.dim()
        )));
    }
    let (mut sub, cross) = r.leave_one_out(k);
    for (i, pi) in p.leave_one_out(k).iter().enumerate() {
        sub[(i, i)] += C64::new(1.0 / pi, 0.0);
    }
    let sol = herm_solve_vec(&sub, &cross)?;
    Ok(embed_reduced(k, r.dim(), &sol))
}

fn embed_reduced(k: usize, users: usize, interferer_part: &CVec) -> CVec {
    CVec::from_fn(users, |i, _| {
        if i == k {
            C64::new(1.0, 0.0)
        } else {
            let idx = if i < k { i } else { i - 1 };
            -interferer_part[idx]
        }
    })
}

/// Coefficient vector of the scheme's canonical per-user beamformer — the
/// normalization the scalar filters below are derived for.
///
/// MRC uses the user's raw channel, ZF the `R^-1` column (unit response to
/// the desired user), and MMSE the reduced form with coefficient 1 on the
/// user's own channel.
pub fn beamformer_coefficients(
    scheme: Scheme,
    k: usize,
    r: &CorrelationMatrix,
    p: &PowerProfile,
) -> Result<CVec> {
    check_user_index(k, r.dim())?;
    match scheme {
        Scheme::Mrc => {
            let mut e = CVec::zeros(r.dim());
            e[k] = C64::new(1.0, 0.0);
            Ok(e)
        }
        Scheme::Zf => {
            let mut e = CVec::zeros(r.dim());
            e[k] = C64::new(1.0, 0.0);
            herm_solve_vec(r.matrix(), &e)
        }
        Scheme::Mmse => reduced_mmse_coefficients(k, r, p),
    }
}

/// Post-combining scalar filters, one per user.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFilter {
    scheme: Scheme,
    beta: Vec<f64>,
}

impl ScalarFilter {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn beta(&self, k: usize) -> f64 {
        self.beta[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.beta
    }
}

/// MSE-optimal scalar filter for user `k` under the scheme's canonical
/// beamformer normalization. Real and positive for all three schemes.
///
/// `powers` are the absolute per-user transmit powers and `noise_variance`
/// the absolute noise level; only the filters need them, every SINR works
/// off the ratios alone.
pub fn scalar_filter(
    scheme: Scheme,
    k: usize,
    r: &CorrelationMatrix,
    powers: &[f64],
    noise_variance: f64,
) -> Result<f64> {
    let users = r.dim();
    check_user_index(k, users)?;
    if powers.len() != users {
        return Err(Error::DimensionMismatch(format!(
            "{} powers for {users} users",
            powers.len()
        )));
    }
    if !positive(noise_variance) {
        return Err(Error::InvalidParameter(
            "noise variance must be positive".into(),
        ));
    }
    let ratios: Vec<f64> = powers.iter().map(|p| p / noise_variance).collect();
    let profile = PowerProfile::new(ratios)?;
    let pk = powers[k];
    let beta = match scheme {
        Scheme::Mrc => {
            let ak = r.gain(k);
            let mut denom = 0.0;
            for (k2, pw) in powers.iter().enumerate() {
                denom += pw * r.entry(k, k2).norm_sqr() / ak;
            }
            pk.sqrt() / (denom + noise_variance)
        }
        Scheme::Zf => {
            let inv_diag = 1.0 / zf_effective_gain(k, r)?;
            pk.sqrt() / (pk + noise_variance * inv_diag)
        }
        Scheme::Mmse => {
            let gain = mmse_effective_gain(k, r, &profile)?;
            pk.sqrt() / (pk * gain + noise_variance)
        }
    };
    Ok(beta)
}

/// All K scalar filters of a scheme.
pub fn scalar_filters(
    scheme: Scheme,
    r: &CorrelationMatrix,
    powers: &[f64],
    noise_variance: f64,
) -> Result<ScalarFilter> {
    let beta = (0..r.dim())
        .map(|k| scalar_filter(scheme, k, r, powers, noise_variance))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ScalarFilter { scheme, beta })
}

/// `a_k - r_k^H R_k^-1 r_k`, the effective channel gain after interference
/// cancellation; equals `1 / [R^-1]_{k,k}`.
pub(crate) fn zf_effective_gain(k: usize, r: &CorrelationMatrix) -> Result<f64> {
    let (sub, cross) = r.leave_one_out(k);
    let sol = herm_solve_vec(&sub, &cross)?;
    let q = cross.dotc(&sol).re;
    Ok(r.gain(k) - q)
}

/// `a_k - r_k^H (P_k^-1 + R_k)^-1 r_k`, the effective gain of the MMSE
/// beamformer.
pub(crate) fn mmse_effective_gain(
    k: usize,
    r: &CorrelationMatrix,
    p: &PowerProfile,
) -> Result<f64> {
    let (mut sub, cross) = r.leave_one_out(k);
    for (i, pi) in p.leave_one_out(k).iter().enumerate() {
        sub[(i, i)] += C64::new(1.0 / pi, 0.0);
    }
    let sol = herm_solve_vec(&sub, &cross)?;
    let q = cross.dotc(&sol).re;
    Ok(r.gain(k) - q)
}

/// Pointwise beamformer value `w_k(r_node) = sum_k' A[k',k] h_k'(r_node)`.
pub fn evaluate_beamformer(
    weights: &WeightMatrix,
    channel: &ChannelMatrix,
    k: usize,
    node: usize,
) -> Result<C64> {
    let users = weights.dim();
    check_user_index(k, users)?;
    if channel.num_users() != users {
        return Err(Error::DimensionMismatch(format!(
            "weight matrix is {users}-user but channel has {}",
            channel.num_users()
        )));
    }
    if node >= channel.num_nodes() {
        return Err(Error::InvalidParameter(format!(
            "node index {node} out of range for {} nodes",
            channel.num_nodes()
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for k2 in 0..users {
        acc += weights.entry(k2, k) * channel.entry(k2, node);
    }
    Ok(acc)
}

/// Beamformer of user `k` sampled on every grid node.
pub fn beamformer_samples(
    weights: &WeightMatrix,
    channel: &ChannelMatrix,
    k: usize,
) -> Result<Vec<C64>> {
    coefficient_samples(&weights.column(k), channel)
}

/// Sampled linear combination `sum_k' c[k'] h_k'(r_n)` for an arbitrary
/// coefficient vector.
pub fn coefficient_samples(coeff: &CVec, channel: &ChannelMatrix) -> Result<Vec<C64>> {
    if coeff.len() != channel.num_users() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} users",
            coeff.len(),
            channel.num_users()
        )));
    }
    let n = channel.num_nodes();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (k2, c) in coeff.iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        for (nn, o) in out.iter_mut().enumerate() {
            *o += c * channel.entry(k2, nn);
        }
    }
    Ok(out)
}
