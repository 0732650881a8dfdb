//! Per-user SINR, rate, MSE, SNR-loss factors, performance bounds, and the
//! two-user closed forms.
//!
//! Every SINR here is evaluated algebraically from the correlation matrix:
//! for a beamformer with coefficient vector `c` (so `w = sum c_k' h_k'`),
//! the aperture integrals collapse to `<w, h_k'> = (c^H R)_k'` and
//! `||w||^2 = c^H R c`, which makes the generic SINR exact rather than a
//! quadrature approximation of a quadrature.
//!
//! All SINRs use only the ratios `p_k = P_k / sigma^2`; the canonical
//! per-user form is `gamma_k = p_k a_k (1 - alpha_k)` with the scheme's SNR
//! loss factor `alpha_k` in `[0, 1)`.

use crate::beamforming::{
    mmse_effective_gain, zf_effective_gain, PowerProfile, Scheme, WeightMatrix,
};
use crate::error::{Error, Result};
use crate::linalg::{positive, CVec};
use crate::quadrature::CorrelationMatrix;

/// Per-user and aggregate link metrics for one scheme on one channel
/// realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrReport {
    pub scheme: Scheme,
    pub gamma: Vec<f64>,
    pub alpha_loss: Vec<f64>,
    /// Effective channel gain `a_k (1 - alpha_k) = gamma_k / p_k`.
    pub effective_gain: Vec<f64>,
    pub rate: Vec<f64>,
    pub mse: Vec<f64>,
    pub sum_rate: f64,
    pub sum_mse: f64,
}

fn check_dims(r: &CorrelationMatrix, p: &PowerProfile, k: usize) -> Result<()> {
    if p.len() != r.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} power ratios for a {}-user correlation matrix",
            p.len(),
            r.dim()
        )));
    }
    if k >= r.dim() {
        return Err(Error::InvalidParameter(format!(
            "user index {k} out of range for {} users",
            r.dim()
        )));
    }
    Ok(())
}

/// SINR of user `k` for an arbitrary beamformer coefficient vector `c`
/// (the beamformer is `w_k = sum_k' c[k'] h_k'`).
pub fn sinr_from_coefficients(
    c: &CVec,
    r: &CorrelationMatrix,
    p: &PowerProfile,
    k: usize,
) -> Result<f64> {
    check_dims(r, p, k)?;
    if c.len() != r.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} users",
            c.len(),
            r.dim()
        )));
    }
    // cross[k'] = <w_k, h_k'> = (c^H R)_k'
    let cross = c.adjoint() * r.matrix();
    let norm = (&cross * c)[(0, 0)].re; // c^H R c = ||w_k||^2
    if !positive(norm) {
        return Err(Error::InvalidParameter(
            "beamformer has zero aperture norm".into(),
        ));
    }
    let mut interference = 0.0;
    for k2 in 0..r.dim() {
        if k2 != k {
            interference += p.ratio(k2) * cross[(0, k2)].norm_sqr();
        }
    }
    let signal = p.ratio(k) * cross[(0, k)].norm_sqr();
    Ok(signal / (interference + norm))
}

/// SINR of user `k` under the weight matrix `a` (column `k` is the
/// beamformer).
pub fn sinr_generic(
    a: &WeightMatrix,
    r: &CorrelationMatrix,
    p: &PowerProfile,
    k: usize,
) -> Result<f64> {
    sinr_from_coefficients(&a.column(k), r, p, k)
}

/// Closed-form MRC SINR `p_k a_k / (r_k^H P_k r_k / a_k + 1)`.
pub fn sinr_mrc(r: &CorrelationMatrix, p: &PowerProfile, k: usize) -> Result<f64> {
    check_dims(r, p, k)?;
    let ak = r.gain(k);
    let mut t = 0.0;
    for k2 in 0..r.dim() {
        if k2 != k {
            t += p.ratio(k2) * r.entry(k2, k).norm_sqr();
        }
    }
    Ok(p.ratio(k) * ak / (t / ak + 1.0))
}

/// Closed-form ZF SINR `p_k (a_k - r_k^H R_k^-1 r_k) = p_k / [R^-1]_{k,k}`.
pub fn sinr_zf(r: &CorrelationMatrix, p: &PowerProfile, k: usize) -> Result<f64> {
    check_dims(r, p, k)?;
    Ok(p.ratio(k) * zf_effective_gain(k, r)?)
}

/// Closed-form MMSE SINR `p_k (a_k - r_k^H (P_k^-1 + R_k)^-1 r_k)`.
pub fn sinr_mmse(r: &CorrelationMatrix, p: &PowerProfile, k: usize) -> Result<f64> {
    check_dims(r, p, k)?;
    Ok(p.ratio(k) * mmse_effective_gain(k, r, p)?)
}

/// Closed-form SINR of the given scheme.
pub fn sinr_closed_form(
    scheme: Scheme,
    r: &CorrelationMatrix,
    p: &PowerProfile,
    k: usize,
) -> Result<f64> {
    match scheme {
        Scheme::Mrc => sinr_mrc(r, p, k),
        Scheme::Zf => sinr_zf(r, p, k),
        Scheme::Mmse => sinr_mmse(r, p, k),
    }
}

/// SNR loss factor `alpha_k` of the scheme, so that
/// `gamma_k = p_k a_k (1 - alpha_k)`. Lies in `[0, 1)`.
pub fn loss_factor(
    scheme: Scheme,
    r: &CorrelationMatrix,
    p: &PowerProfile,
    k: usize,
) -> Result<f64> {
    check_dims(r, p, k)?;
    let ak = r.gain(k);
    let alpha = match scheme {
        Scheme::Mrc => {
            let mut t = 0.0;
            for k2 in 0..r.dim() {
                if k2 != k {
                    t += p.ratio(k2) * r.entry(k2, k).norm_sqr();
                }
            }
            t / (ak + t)
        }
        Scheme::Zf => (ak - zf_effective_gain(k, r)?) / ak,
        Scheme::Mmse => (ak - mmse_effective_gain(k, r, p)?) / ak,
    };
    Ok(alpha.clamp(0.0, 1.0))
}

/// Rates `log2(1 + gamma)` and MSEs `1 / (1 + gamma)` with their sums.
pub fn rate_and_mse(gamma: &[f64]) -> (Vec<f64>, Vec<f64>, f64, f64) {
    let rates: Vec<f64> = gamma.iter().map(|g| (1.0 + g).log2()).collect();
    let mses: Vec<f64> = gamma.iter().map(|g| 1.0 / (1.0 + g)).collect();
    let sum_rate = rates.iter().sum();
    let sum_mse = mses.iter().sum();
    (rates, mses, sum_rate, sum_mse)
}

/// Interference-free ceiling for one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceBound {
    /// `p_k a_k`, the single-user SNR.
    pub gamma_max: f64,
    pub rate_max: f64,
    pub mse_min: f64,
}

/// Per-user upper bounds `gamma_k <= p_k a_k` attained when all channels
/// are mutually orthogonal.
pub fn performance_bounds(
    r: &CorrelationMatrix,
    p: &PowerProfile,
) -> Result<Vec<PerformanceBound>> {
    check_dims(r, p, 0)?;
    Ok((0..r.dim())
        .map(|k| {
            let gamma_max = p.ratio(k) * r.gain(k);
            PerformanceBound {
                gamma_max,
                rate_max: (1.0 + gamma_max).log2(),
                mse_min: 1.0 / (1.0 + gamma_max),
            }
        })
        .collect())
}

/// User-1 SINRs of the two-user closed forms, as functions of the channel
/// gains, power ratios, and the squared correlation coefficient `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoUserSinrs {
    pub mrc: f64,
    pub zf: f64,
    pub mmse: f64,
}

/// Two-user closed forms for user 1:
///
/// ```text
/// gamma_MRC  = p1 a1 (1 - p2 a2 rho / (1 + p2 a2 rho))
/// gamma_ZF   = p1 a1 (1 - rho)
/// gamma_MMSE = p1 a1 (1 - p2 a2 rho / (1 + p2 a2))
/// ```
pub fn two_user_closed_forms(a1: f64, a2: f64, p1: f64, p2: f64, rho: f64) -> TwoUserSinrs {
    let snr1 = p1 * a1;
    let x = p2 * a2;
    TwoUserSinrs {
        mrc: snr1 * (1.0 - x * rho / (1.0 + x * rho)),
        zf: snr1 * (1.0 - rho),
        mmse: snr1 * (1.0 - x * rho / (1.0 + x)),
    }
}

/// Correlation threshold above which two-user MRC outperforms ZF:
/// `rho > 1 - sigma^2 / (P_2 a_2) = 1 - 1 / (p2 a2)`.
pub fn mrc_beats_zf_threshold(p2: f64, a2: f64) -> f64 {
    1.0 - 1.0 / (p2 * a2)
}

/// Full metric report for one scheme, built from the canonical
/// `gamma = p a (1 - alpha)` form.
pub fn report(scheme: Scheme, r: &CorrelationMatrix, p: &PowerProfile) -> Result<SinrReport> {
    check_dims(r, p, 0)?;
    let users = r.dim();
    let mut gamma = Vec::with_capacity(users);
    let mut alpha_loss = Vec::with_capacity(users);
    let mut effective_gain = Vec::with_capacity(users);
    for k in 0..users {
        let alpha = loss_factor(scheme, r, p, k)?;
        let eff = r.gain(k) * (1.0 - alpha);
        alpha_loss.push(alpha);
        effective_gain.push(eff);
        gamma.push(p.ratio(k) * eff);
    }
    let (rate, mse, sum_rate, sum_mse) = rate_and_mse(&gamma);
    Ok(SinrReport {
        scheme,
        gamma,
        alpha_loss,
        effective_gain,
        rate,
        mse,
        sum_rate,
        sum_mse,
    })
}
