//! Numerical verification of the operator and matrix identities behind the
//! closed-form beamformers: blockwise inversion, projection kernels,
//! square-root/whitening kernels, MMSE form equivalences, and the low/high
//! SNR limits.
//!
//! Every check reduces to exact coefficient algebra (see [`crate::kernels`])
//! or small Hermitian solves, reports a scaled residual, and carries its own
//! tolerance. [`run_full_suite`] aggregates the worst residual per identity
//! over a batch of random positive-definite instances and reference-scenario
//! channel draws; it is what the CLI `verify` command runs.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::beamforming::{mmse_weights, reduced_mmse_coefficients, zf_weights, PowerProfile};
use crate::error::{Error, Result};
use crate::kernels::{apply, compose, eval_smooth, operator_family, KernelBasis, KernelOperator};
use crate::linalg::{
    column_angle, herm_inverse, herm_solve_vec, hermitize, max_abs, CMat, CVec, C64,
};
use crate::metrics::{sinr_from_coefficients, sinr_mmse};
use crate::quadrature::{inner_product, ChannelMatrix, CorrelationMatrix};
use crate::scenario::Scenario;

/// One verified identity: a scaled residual and the tolerance it must meet.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn new(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            residual,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tolerance
    }
}

fn rel(num: f64, scale: f64) -> f64 {
    num / scale.max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------------------
// Gram-Schmidt over the aperture inner product
// ---------------------------------------------------------------------------

/// Orthonormalize the rows of `phi` under the quadrature inner product.
///
/// Modified Gram-Schmidt with one re-orthogonalization pass; errors out if
/// a row collapses to numerical zero (rank deficiency).
pub fn gram_schmidt(phi: &CMat, grid: &crate::quadrature::QuadratureGrid) -> Result<CMat> {
    let k = phi.nrows();
    let n = phi.ncols();
    if n != grid.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "rows sampled on {n} nodes but grid has {}",
            grid.num_nodes()
        )));
    }
    let mut rows: Vec<Vec<C64>> = (0..k)
        .map(|i| (0..n).map(|j| phi[(i, j)]).collect())
        .collect();
    let mut done: Vec<Vec<C64>> = Vec::with_capacity(k);
    for (i, row) in rows.iter_mut().enumerate() {
        let original = inner_product(row, row, grid)?.re.sqrt();
        for _pass in 0..2 {
            for prev in &done {
                let proj = inner_product(prev, row, grid)?;
                for (r, p) in row.iter_mut().zip(prev) {
                    *r -= proj * p;
                }
            }
        }
        let norm = inner_product(row, row, grid)?.re.sqrt();
        let floor = 1e-10 * original.max(f64::MIN_POSITIVE);
        if !(norm.is_finite() && norm > floor) {
            return Err(Error::RankDeficient(format!(
                "row {i} lies in the span of the previous rows"
            )));
        }
        for r in row.iter_mut() {
            *r /= norm;
        }
        done.push(row.clone());
    }
    Ok(CMat::from_fn(k, n, |i, j| done[i][j]))
}

// ---------------------------------------------------------------------------
// Blockwise inversion
// ---------------------------------------------------------------------------

/// First column of the inverse of the user-`k`-permuted correlation matrix,
/// computed from the leave-one-out blocks:
/// `[1; -R_k^-1 r_k] / (a_k - r_k^H R_k^-1 r_k)`.
pub fn blockwise_first_column(r: &CorrelationMatrix, k: usize) -> Result<CVec> {
    if k >= r.dim() {
        return Err(Error::InvalidParameter(format!(
            "user index {k} out of range for {} users",
            r.dim()
        )));
    }
    let (sub, cross) = r.leave_one_out(k);
    let sol = herm_solve_vec(&sub, &cross)?;
    let schur = r.gain(k) - cross.dotc(&sol).re;
    let dim = r.dim();
    Ok(CVec::from_fn(dim, |i, _| {
        if i == 0 {
            C64::new(1.0 / schur, 0.0)
        } else {
            -sol[i - 1] / schur
        }
    }))
}

/// Check the blockwise-inversion column against the directly inverted
/// matrix, and the Schur complement against the inverse diagonal.
pub fn verify_blockwise_inversion(r: &CorrelationMatrix) -> Result<Vec<IdentityCheck>> {
    let inv = herm_inverse(r.matrix())?;
    let scale = max_abs(&inv);
    let mut col_res = 0.0f64;
    let mut diag_res = 0.0f64;
    for k in 0..r.dim() {
        let col = blockwise_first_column(r, k)?;
        // expected permuted order: [R^-1]_kk first, then column k of R^-1
        // with the k-th entry removed
        let mut expected = Vec::with_capacity(r.dim());
        expected.push(inv[(k, k)]);
        for i in 0..r.dim() {
            if i != k {
                expected.push(inv[(i, k)]);
            }
        }
        for (c, e) in col.iter().zip(&expected) {
            col_res = col_res.max((c - e).norm());
        }
        let schur = 1.0 / col[0].re;
        diag_res = diag_res.max((schur - 1.0 / inv[(k, k)].re).abs() * inv[(k, k)].re.abs());
    }
    Ok(vec![
        IdentityCheck::new("blockwise_inverse_column", rel(col_res, scale), 1e-9),
        IdentityCheck::new("schur_diagonal_identity", diag_res, 1e-9),
    ])
}

// ---------------------------------------------------------------------------
// Operator family identities (coefficient algebra only)
// ---------------------------------------------------------------------------

/// Compose a chain of kernels left to right, tracking the largest smooth
/// coefficient magnitude seen among operands and partial results.
/// Residuals of the resulting identities are scaled by that magnitude: the
/// cancellations run through those intermediates, so it is the natural
/// matrix-norm scale of the computation.
fn compose_chain(gram: &CMat, ops: &[&KernelOperator]) -> Result<(KernelOperator, f64)> {
    let mut scale = 1.0f64;
    let mut iter = ops.iter();
    let first = *iter.next().expect("non-empty chain");
    scale = scale.max(max_abs(first.smooth()));
    let mut acc = first.clone();
    for op in iter {
        scale = scale.max(max_abs(op.smooth()));
        acc = compose(gram, &acc, op)?;
        scale = scale.max(max_abs(acc.smooth()));
    }
    Ok((acc, scale))
}

/// Verify the square-root/inverse kernel identities on one Gram matrix:
/// mutual inverses, the whitening sandwich, the inverse kernel, both
/// squared forms, and associativity of composition.
pub fn verify_operator_family(gram: &CMat) -> Result<Vec<IdentityCheck>> {
    let fam = operator_family(gram)?;
    let b = fam.sqrt_kernel();
    let b_bar = fam.inv_sqrt_kernel();
    let c = fam.covariance_kernel();
    let c_bar = fam.inverse_kernel();
    let id = KernelOperator::identity(gram.nrows());
    let gram_scale = max_abs(gram).max(1.0);

    let mut checks = Vec::new();

    let (bb1, s1) = compose_chain(gram, &[&b_bar, &b])?;
    let (bb2, s2) = compose_chain(gram, &[&b, &b_bar])?;
    checks.push(IdentityCheck::new(
        "sqrt_mutual_inverse",
        rel(
            bb1.distance(&id).max(bb2.distance(&id)),
            s1.max(s2) * gram_scale,
        ),
        1e-10,
    ));

    let (sandwich, s) = compose_chain(gram, &[&b_bar, &c, &b_bar])?;
    checks.push(IdentityCheck::new(
        "sqrt_sandwich_whitening",
        rel(sandwich.distance(&id), s * gram_scale),
        1e-10,
    ));

    let (cc1, s1) = compose_chain(gram, &[&c_bar, &c])?;
    let (cc2, s2) = compose_chain(gram, &[&c, &c_bar])?;
    checks.push(IdentityCheck::new(
        "inverse_kernel_identity",
        rel(
            cc1.distance(&id).max(cc2.distance(&id)),
            s1.max(s2) * gram_scale,
        ),
        1e-10,
    ));

    let (bbar_sq, s) = compose_chain(gram, &[&b_bar, &b_bar])?;
    checks.push(IdentityCheck::new(
        "inv_sqrt_squared_is_inverse",
        rel(bbar_sq.distance(&c_bar), s * gram_scale),
        1e-10,
    ));

    let (b_sq, s) = compose_chain(gram, &[&b, &b])?;
    checks.push(IdentityCheck::new(
        "sqrt_squared_is_covariance",
        rel(b_sq.distance(&c), s * gram_scale),
        1e-10,
    ));

    let (left, s1) = compose_chain(gram, &[&b_bar, &c, &b])?;
    let inner = compose(gram, &c, &b)?;
    let (right, s2) = compose_chain(gram, &[&b_bar, &inner])?;
    checks.push(IdentityCheck::new(
        "composition_associativity",
        rel(left.distance(&right), s1.max(s2) * gram_scale),
        1e-10,
    ));

    Ok(checks)
}

// ---------------------------------------------------------------------------
// Projection kernel (interference subspace)
// ---------------------------------------------------------------------------

/// Verify the interference-subspace projection kernel of user `k`:
/// idempotence, reproduction of each interferer, orthogonality of the
/// projected-out beamformer, the dual construction through an orthonormal
/// basis, and the orthogonal-split inner product.
pub fn verify_projection_kernel(
    k: usize,
    h: &ChannelMatrix,
    r: &CorrelationMatrix,
    pair_samples: usize,
    seed: u64,
) -> Result<Vec<IdentityCheck>> {
    let users = r.dim();
    let grid = h.grid().clone();
    let others: Vec<usize> = (0..users).filter(|&i| i != k).collect();
    if others.is_empty() {
        // single user: the interference subspace is empty and every check
        // is vacuously exact
        return Ok(vec![
            IdentityCheck::new("projection_idempotence", 0.0, 1e-9),
            IdentityCheck::new("projection_reproduction", 0.0, 1e-8),
            IdentityCheck::new("projection_zero_interference", 0.0, 1e-8),
            IdentityCheck::new("projection_dual_construction", 0.0, 1e-8),
            IdentityCheck::new("projection_orthogonal_split", 0.0, 1e-9),
        ]);
    }

    let rows: Vec<Vec<C64>> = others.iter().map(|&i| h.row(i)).collect();
    let basis = KernelBasis::from_rows(&rows, &grid)?;
    let (sub, _) = r.leave_one_out(k);
    let sub_inv = herm_inverse(&sub)?;
    let proj = KernelOperator::smooth_only(sub_inv.clone());

    let mut checks = Vec::new();

    // idempotence: M Psi M = M in coefficient space
    let pp = compose(basis.gram(), &proj, &proj)?;
    checks.push(IdentityCheck::new(
        "projection_idempotence",
        rel(pp.distance(&proj), max_abs(&sub_inv).max(1.0)),
        1e-9,
    ));

    // each interferer is reproduced exactly
    let mut repro = 0.0f64;
    for row in &rows {
        let projected = apply(&basis, &proj, row)?;
        let scale = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = projected
            .iter()
            .zip(row)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        repro = repro.max(rel(err, scale));
    }
    checks.push(IdentityCheck::new("projection_reproduction", repro, 1e-8));

    // w = h_k - P h_k is orthogonal to every interferer
    let hk = h.row(k);
    let projected_hk = apply(&basis, &proj, &hk)?;
    let w: Vec<C64> = hk.iter().zip(&projected_hk).map(|(a, b)| a - b).collect();
    let w_norm = inner_product(&w, &w, &grid)?.re.sqrt();
    let mut ortho = 0.0f64;
    for &i in &others {
        let hi = h.row(i);
        let cross_ip = inner_product(&w, &hi, &grid)?;
        let hi_norm = r.gain(i).sqrt();
        ortho = ortho.max(cross_ip.norm() / (w_norm * hi_norm).max(f64::MIN_POSITIVE));
    }
    checks.push(IdentityCheck::new(
        "projection_zero_interference",
        ortho,
        1e-8,
    ));

    // the same kernel built from a Gram-Schmidt orthonormal basis
    let phi = CMat::from_fn(others.len(), grid.num_nodes(), |i, j| rows[i][j]);
    let ortho_rows = gram_schmidt(&phi, &grid)?;
    let ortho_basis = KernelBasis::new(ortho_rows, &grid)?;
    let eye = CMat::identity(others.len(), others.len());
    let proj2 = KernelOperator::smooth_only(eye);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dual = 0.0f64;
    let mut kernel_scale = 0.0f64;
    for _ in 0..pair_samples {
        let i = rng.random_range(0..grid.num_nodes());
        let j = rng.random_range(0..grid.num_nodes());
        let v1 = eval_smooth(&basis, &proj, i, j);
        let v2 = eval_smooth(&ortho_basis, &proj2, i, j);
        dual = dual.max((v1 - v2).norm());
        kernel_scale = kernel_scale.max(v1.norm());
    }
    checks.push(IdentityCheck::new(
        "projection_dual_construction",
        rel(dual, kernel_scale),
        1e-8,
    ));

    // <P h_k, h_k - P h_k> = 0
    let split = inner_product(&projected_hk, &w, &grid)?;
    let p_norm = inner_product(&projected_hk, &projected_hk, &grid)?
        .re
        .sqrt();
    checks.push(IdentityCheck::new(
        "projection_orthogonal_split",
        rel(split.norm(), (p_norm * w_norm).max(r.gain(k))),
        1e-9,
    ));

    Ok(checks)
}

// ---------------------------------------------------------------------------
// Whitening on channel draws
// ---------------------------------------------------------------------------

/// Verify that the inverse-square-root kernel of the power-weighted
/// interference covariance whitens it, and that matched filtering after
/// whitening reproduces the closed-form MMSE SINR.
pub fn verify_whitening(
    k: usize,
    h: &ChannelMatrix,
    r: &CorrelationMatrix,
    p: &PowerProfile,
) -> Result<Vec<IdentityCheck>> {
    let users = r.dim();
    let grid = h.grid().clone();
    let others: Vec<usize> = (0..users).filter(|&i| i != k).collect();

    // power-weighted interferer basis sqrt(p_k') h_k'
    let rows: Vec<Vec<C64>> = others
        .iter()
        .map(|&i| {
            let scale = p.ratio(i).sqrt();
            h.row(i).into_iter().map(|z| z * scale).collect()
        })
        .collect();
    let basis = KernelBasis::from_rows(&rows, &grid)?;
    let fam = operator_family(basis.gram())?;
    let b_bar = fam.inv_sqrt_kernel();
    let id = KernelOperator::identity(basis.dim());

    let (sandwich, chain_scale) =
        compose_chain(basis.gram(), &[&b_bar, &fam.covariance_kernel(), &b_bar])?;
    let scale = chain_scale * max_abs(basis.gram()).max(1.0);
    let mut checks = vec![IdentityCheck::new(
        "channel_whitening_sandwich",
        rel(sandwich.distance(&id), scale),
        1e-9,
    )];

    // whiten the desired channel, then matched-filter: p_k ||B̄ h_k||^2
    // must equal the closed-form MMSE SINR
    let whitened = apply(&basis, &b_bar, &h.row(k))?;
    let energy = inner_product(&whitened, &whitened, &grid)?.re;
    let two_stage = p.ratio(k) * energy;
    let closed = sinr_mmse(r, p, k)?;
    checks.push(IdentityCheck::new(
        "whitened_matched_filter_sinr",
        (two_stage - closed).abs() / closed.max(f64::MIN_POSITIVE),
        1e-9,
    ));

    Ok(checks)
}

// ---------------------------------------------------------------------------
// ZF zero interference on channel draws
// ---------------------------------------------------------------------------

/// Verify the zero-interference conditions of the ZF beamformer by direct
/// quadrature: normalized cross responses below tolerance off the diagonal
/// and unit response on it.
pub fn verify_zf_zero_interference(
    h: &ChannelMatrix,
    r: &CorrelationMatrix,
) -> Result<Vec<IdentityCheck>> {
    let weights = zf_weights(r)?;
    let grid = h.grid().clone();
    let users = r.dim();
    let mut off = 0.0f64;
    let mut diag = 0.0f64;
    for k in 0..users {
        let wk = crate::beamforming::beamformer_samples(&weights, h, k)?;
        let w_norm = inner_product(&wk, &wk, &grid)?.re.sqrt();
        for k2 in 0..users {
            let response = inner_product(&wk, &h.row(k2), &grid)?;
            if k2 == k {
                diag = diag.max((response - C64::new(1.0, 0.0)).norm());
            } else {
                let h_norm = r.gain(k2).sqrt();
                off = off.max(response.norm() / (w_norm * h_norm).max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(vec![
        IdentityCheck::new("zf_zero_interference", off, 1e-8),
        IdentityCheck::new("zf_unit_response", diag, 1e-8),
    ])
}

// ---------------------------------------------------------------------------
// Effective-gain chain
// ---------------------------------------------------------------------------

/// Verify `a_k > r^H R_k^-1 r >= r^H (P_k^-1 + R_k)^-1 r >= 0` for every
/// user: the interference-cancellation loss never exceeds the channel gain
/// and shrinks when noise is accounted for.
pub fn verify_effective_gain_chain(
    r: &CorrelationMatrix,
    p: &PowerProfile,
) -> Result<Vec<IdentityCheck>> {
    let mut violation = 0.0f64;
    for k in 0..r.dim() {
        let ak = r.gain(k);
        let (sub, cross) = r.leave_one_out(k);
        let q_zf = if sub.nrows() == 0 {
            0.0
        } else {
            cross.dotc(&herm_solve_vec(&sub, &cross)?).re
        };
        let mut shifted = sub.clone();
        for (i, pi) in p.leave_one_out(k).iter().enumerate() {
            shifted[(i, i)] += C64::new(1.0 / pi, 0.0);
        }
        let q_mmse = if shifted.nrows() == 0 {
            0.0
        } else {
            cross.dotc(&herm_solve_vec(&shifted, &cross)?).re
        };
        violation = violation
            .max((q_zf - ak) / ak)
            .max((q_mmse - q_zf) / ak)
            .max(-q_mmse / ak);
    }
    Ok(vec![IdentityCheck::new(
        "effective_gain_chain",
        violation.max(0.0),
        1e-10,
    )])
}

// ---------------------------------------------------------------------------
// MMSE form equivalences
// ---------------------------------------------------------------------------

/// Verify the equivalences among the MMSE beamformer's printed forms:
/// the reduced form is parallel to the weight-matrix column, the
/// MSE-optimal form equals the scalar filter times the rate-optimal form,
/// the two weight-matrix expressions agree, and no random coefficient
/// perturbation beats the closed-form SINR.
pub fn verify_mmse_equivalences(
    r: &CorrelationMatrix,
    p: &PowerProfile,
    probes: usize,
    seed: u64,
) -> Result<Vec<IdentityCheck>> {
    let users = r.dim();
    let weights = mmse_weights(r, p)?;

    let mut checks = Vec::new();

    // reduced form parallel to the weight-matrix column
    let mut angle = 0.0f64;
    for k in 0..users {
        let reduced = reduced_mmse_coefficients(k, r, p)?;
        angle = angle.max(column_angle(&reduced, &weights.column(k)));
    }
    checks.push(IdentityCheck::new("mmse_form_equivalence", angle, 1e-8));

    // MSE-optimal coefficients are beta times the rate-optimal ones
    // (absolute powers enter both sides; any consistent noise level works,
    // so use sigma^2 = 1 and P_k = p_k)
    let powers: Vec<f64> = p.ratios().to_vec();
    let mut scaling = 0.0f64;
    let ps = p.diag_sqrt();
    let full_c = {
        let mut m = CMat::identity(users, users) + &ps * r.matrix() * &ps;
        hermitize(&mut m);
        herm_inverse(&m)?
    };
    for k in 0..users {
        let beta = crate::beamforming::scalar_filter(
            crate::beamforming::Scheme::Mmse,
            k,
            r,
            &powers,
            1.0,
        )?;
        let reduced = reduced_mmse_coefficients(k, r, p)?;
        // direct MSE-minimizing form: (sqrt(P_k)/sigma^2)(e_k - P^1/2 C P^1/2 r_k)
        let rk = CVec::from_fn(users, |i, _| r.entry(i, k));
        let correction = &ps * &full_c * &ps * rk;
        let mut direct = CVec::zeros(users);
        for i in 0..users {
            let base = if i == k {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            direct[i] = powers[k].sqrt() * (base - correction[i]);
        }
        let expected = reduced * C64::new(beta, 0.0);
        let err = (&direct - &expected).norm();
        scaling = scaling.max(rel(err, direct.norm()));
    }
    checks.push(IdentityCheck::new("mmse_scalar_scaling", scaling, 1e-9));

    // (I - (P^-1 + R)^-1 R) = (I + P R)^-1
    let pinv = CMat::from_fn(users, users, |i, j| {
        if i == j {
            C64::new(1.0 / p.ratio(i), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut shifted = pinv + r.matrix();
    hermitize(&mut shifted);
    let alt = CMat::identity(users, users) - herm_inverse(&shifted)? * r.matrix();
    let ident_res = max_abs(&(&alt - weights.matrix()));
    checks.push(IdentityCheck::new(
        "mmse_weight_identity",
        rel(ident_res, max_abs(weights.matrix())),
        1e-10,
    ));

    // brute-force dominance probe on user 1's beamformer
    let k = 0;
    let base = reduced_mmse_coefficients(k, r, p)?;
    let gamma_opt = sinr_mmse(r, p, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut excess = 0.0f64;
    for _ in 0..probes {
        let mut u = CVec::from_fn(users, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let norm = u.norm();
        if norm == 0.0 {
            continue;
        }
        u /= C64::new(norm, 0.0);
        let perturbed = &base + u;
        if let Ok(gamma) = sinr_from_coefficients(&perturbed, r, p, k) {
            excess = excess.max((gamma - gamma_opt) / gamma_opt.max(f64::MIN_POSITIVE));
        }
    }
    checks.push(IdentityCheck::new(
        "mmse_local_optimality",
        excess.max(0.0),
        1e-9,
    ));

    Ok(checks)
}

// ---------------------------------------------------------------------------
// Asymptotic limits
// ---------------------------------------------------------------------------

/// One row of the SNR-scale sweep: worst-case (over users) principal angles
/// between the MMSE columns and the MRC/ZF columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticsRow {
    pub scale: f64,
    pub angle_to_mrc: f64,
    pub angle_to_zf: f64,
}

/// Sweep the SNR scale and verify that the MMSE weight matrix converges to
/// MRC at low SNR and to ZF at high SNR, with per-user angles monotone
/// along the sweep.
pub fn verify_asymptotics(
    r: &CorrelationMatrix,
    p: &PowerProfile,
    scales: &[f64],
) -> Result<(Vec<AsymptoticsRow>, Vec<IdentityCheck>)> {
    if scales.len() < 2 || scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "need at least two strictly increasing scales".into(),
        ));
    }
    let users = r.dim();
    let zf = zf_weights(r)?;
    let mut table = Vec::with_capacity(scales.len());
    let mut per_user: Vec<Vec<(f64, f64)>> = vec![Vec::new(); users];
    for &scale in scales {
        let scaled = p.scaled(scale)?;
        let weights = mmse_weights(r, &scaled)?;
        let mut worst_mrc = 0.0f64;
        let mut worst_zf = 0.0f64;
        for k in 0..users {
            let col = weights.column(k);
            let mut e = CVec::zeros(users);
            e[k] = C64::new(1.0, 0.0);
            let a_mrc = column_angle(&col, &e);
            let a_zf = column_angle(&col, &zf.column(k));
            per_user[k].push((a_mrc, a_zf));
            worst_mrc = worst_mrc.max(a_mrc);
            worst_zf = worst_zf.max(a_zf);
        }
        table.push(AsymptoticsRow {
            scale,
            angle_to_mrc: worst_mrc,
            angle_to_zf: worst_zf,
        });
    }

    let low = table.first().expect("non-empty");
    let high = table.last().expect("non-empty");
    let mut monotone_violation = 0.0f64;
    for angles in &per_user {
        for w in angles.windows(2) {
            monotone_violation = monotone_violation.max(w[0].0 - w[1].0); // MRC angle must rise
            monotone_violation = monotone_violation.max(w[1].1 - w[0].1); // ZF angle must fall
        }
    }
    let checks = vec![
        IdentityCheck::new("mmse_low_snr_limit", low.angle_to_mrc, 1e-3),
        IdentityCheck::new("mmse_high_snr_limit", high.angle_to_zf, 1e-3),
        IdentityCheck::new("mmse_limit_monotonicity", monotone_violation.max(0.0), 1e-9),
    ];
    Ok((table, checks))
}

/// The decade-spaced scale sweep used by the suite, `1e-8` through `1e8`.
pub fn default_scale_sweep() -> Vec<f64> {
    (-8..=8).step_by(2).map(|e| 10f64.powi(e)).collect()
}

// ---------------------------------------------------------------------------
// Full suite
// ---------------------------------------------------------------------------

/// Configuration of the aggregate verification run.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Number of random positive-definite instances (dimensions cycle
    /// through 2..=max_dim).
    pub random_instances: usize,
    pub max_dim: usize,
    /// Number of reference-scenario channel draws.
    pub scenario_draws: usize,
    pub quad_order: usize,
    /// Perturbation probes for the local-optimality check.
    pub probes: usize,
    /// Replace every identity's built-in tolerance.
    pub tolerance_override: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2027,
            random_instances: 100,
            max_dim: 16,
            scenario_draws: 20,
            quad_order: 30,
            probes: 1000,
            tolerance_override: None,
        }
    }
}

/// Worst residual observed for one identity across the whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentitySummary {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl IdentitySummary {
    pub fn passed(&self) -> bool {
        self.max_residual.is_finite() && self.max_residual <= self.tolerance
    }
}

/// Aggregate report of the verification suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub checks: Vec<IdentitySummary>,
    pub random_instances: usize,
    pub scenario_draws: usize,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

fn random_pd_gram(rng: &mut ChaCha8Rng, dim: usize) -> CMat {
    let g = CMat::from_fn(dim, dim + 3, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let mut m = &g * g.adjoint();
    hermitize(&mut m);
    m
}

struct Accumulator {
    map: BTreeMap<&'static str, (f64, f64)>,
    tolerance_override: Option<f64>,
}

impl Accumulator {
    fn new(tolerance_override: Option<f64>) -> Self {
        Self {
            map: BTreeMap::new(),
            tolerance_override,
        }
    }

    fn add(&mut self, checks: Vec<IdentityCheck>) {
        for c in checks {
            let tol = self.tolerance_override.unwrap_or(c.tolerance);
            let entry = self.map.entry(c.name).or_insert((0.0, tol));
            entry.0 = entry.0.max(c.residual);
            entry.1 = tol;
        }
    }

    fn finish(self) -> Vec<IdentitySummary> {
        self.map
            .into_iter()
            .map(|(name, (max_residual, tolerance))| IdentitySummary {
                name: name.to_string(),
                max_residual,
                tolerance,
            })
            .collect()
    }
}

/// Run every identity check on random positive-definite instances and on
/// reference-scenario channel draws, and aggregate the worst residuals.
pub fn run_full_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Accumulator::new(cfg.tolerance_override);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let scales = default_scale_sweep();

    // synthetic Gram matrices exercise the pure matrix algebra over the
    // whole dimension range
    for i in 0..cfg.random_instances {
        let dim = 2 + i % (cfg.max_dim.max(3) - 1);
        let gram = random_pd_gram(&mut rng, dim);
        acc.add(verify_operator_family(&gram)?);

        let r = CorrelationMatrix::from_matrix(gram)?;
        let ratios: Vec<f64> = (0..dim).map(|_| 0.1 + 10.0 * rng.random::<f64>()).collect();
        let p = PowerProfile::new(ratios)?;
        acc.add(verify_blockwise_inversion(&r)?);
        acc.add(verify_effective_gain_chain(&r, &p)?);
        acc.add(verify_mmse_equivalences(
            &r,
            &p,
            cfg.probes.min(100),
            cfg.seed ^ i as u64,
        )?);
        // the limit sweep scales every user's SNR together; a uniform base
        // keeps the per-user angle curves strictly monotone
        let uniform = PowerProfile::uniform(0.1 + 10.0 * rng.random::<f64>(), dim)?;
        let (_, checks) = verify_asymptotics(&r, &uniform, &scales)?;
        acc.add(checks);
    }

    // reference-scenario channel draws exercise the quadrature-backed
    // checks end to end
    let sc = Scenario {
        quad_order: cfg.quad_order,
        ..Scenario::default()
    };
    let grid = sc.grid()?;
    for draw in 0..cfg.scenario_draws {
        let (_, h, r) = sc.channel_for_trial(cfg.seed, draw as u64, &grid)?;
        let p = sc.power_profile()?;
        acc.add(verify_zf_zero_interference(&h, &r)?);
        acc.add(verify_blockwise_inversion(&r)?);
        acc.add(verify_effective_gain_chain(&r, &p)?);
        acc.add(verify_mmse_equivalences(
            &r,
            &p,
            cfg.probes,
            cfg.seed ^ 0xd5 ^ draw as u64,
        )?);
        let (_, checks) = verify_asymptotics(&r, &p, &scales)?;
        acc.add(checks);
        acc.add(verify_operator_family(r.matrix())?);
        for k in 0..r.dim() {
            acc.add(verify_projection_kernel(
                k,
                &h,
                &r,
                125,
                cfg.seed ^ (k as u64) << 8,
            )?);
            acc.add(verify_whitening(k, &h, &r, &p)?);
        }
    }

    Ok(SuiteReport {
        checks: acc.finish(),
        random_instances: cfg.random_instances,
        scenario_draws: cfg.scenario_draws,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::tensor_grid;

    fn scenario_draw(seed: u64) -> (ChannelMatrix, CorrelationMatrix, PowerProfile) {
        let sc = Scenario::default();
        let grid = sc.grid().unwrap();
        let (_, h, r) = sc.channel_for_trial(seed, 0, &grid).unwrap();
        (h, r, sc.power_profile().unwrap())
    }

    #[test]
    fn gram_schmidt_orthonormalizes_channel_rows() {
        let (h, r, _) = scenario_draw(31);
        let grid = h.grid().clone();
        let phi = CMat::from_fn(r.dim(), grid.num_nodes(), |i, j| h.entry(i, j));
        let psi = gram_schmidt(&phi, &grid).unwrap();
        // Gram matrix of the output is the identity
        for i in 0..r.dim() {
            for j in 0..r.dim() {
                let rows_i: Vec<C64> = (0..grid.num_nodes()).map(|n| psi[(i, n)]).collect();
                let rows_j: Vec<C64> = (0..grid.num_nodes()).map(|n| psi[(j, n)]).collect();
                let ip = inner_product(&rows_i, &rows_j, &grid).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (ip - C64::new(expect, 0.0)).norm() < 1e-9,
                    "({i},{j}): {ip}"
                );
            }
        }
        // span is preserved: projecting each original row onto the new
        // basis recovers it
        for i in 0..r.dim() {
            let row = h.row(i);
            let mut recovered = vec![C64::new(0.0, 0.0); grid.num_nodes()];
            for j in 0..r.dim() {
                let basis_row: Vec<C64> = (0..grid.num_nodes()).map(|n| psi[(j, n)]).collect();
                let coef = inner_product(&basis_row, &row, &grid).unwrap();
                for (out, b) in recovered.iter_mut().zip(&basis_row) {
                    *out += coef * b;
                }
            }
            let scale = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let err = recovered
                .iter()
                .zip(&row)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-9 * scale, "row {i}: {err:.3e}");
        }
    }

    #[test]
    fn gram_schmidt_passes_orthonormal_inputs_through() {
        let ap = crate::geometry::Aperture::new(2.0, 0.5).unwrap();
        let grid = tensor_grid(&ap, 5, 5).unwrap();
        let area = grid.total_weight();
        let n = grid.num_nodes();
        // two disjoint-support indicator rows, normalized
        let mut rows = CMat::zeros(2, n);
        let mut w0 = 0.0;
        let mut w1 = 0.0;
        for i in 0..n {
            if grid.node(i).x < 0.0 {
                w0 += grid.weight(i);
            } else {
                w1 += grid.weight(i);
            }
        }
        assert!((w0 + w1 - area).abs() < 1e-12);
        for i in 0..n {
            if grid.node(i).x < 0.0 {
                rows[(0, i)] = C64::new(1.0 / w0.sqrt(), 0.0);
            } else {
                rows[(1, i)] = C64::new(1.0 / w1.sqrt(), 0.0);
            }
        }
        let out = gram_schmidt(&rows, &grid).unwrap();
        assert!(max_abs(&(&out - &rows)) < 1e-12);
    }

    #[test]
    fn gram_schmidt_rejects_parallel_rows() {
        let ap = crate::geometry::Aperture::new(0.5, 0.5).unwrap();
        let grid = tensor_grid(&ap, 3, 3).unwrap();
        let n = grid.num_nodes();
        let rows = CMat::from_fn(2, n, |i, j| {
            C64::new((j + 1) as f64, -1.0) * C64::new(1.0 + i as f64, 0.0)
        });
        assert!(matches!(
            gram_schmidt(&rows, &grid),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn blockwise_column_diagonal_two_user_case() {
        let m = CMat::from_fn(2, 2, |i, j| {
            if i == j {
                C64::new(2.0 + i as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let r = CorrelationMatrix::from_matrix(m).unwrap();
        for k in 0..2 {
            let col = blockwise_first_column(&r, k).unwrap();
            assert!((col[0].re - 1.0 / r.gain(k)).abs() < 1e-14);
            assert!(col[1].norm() < 1e-15);
        }
    }

    #[test]
    fn scenario_draw_passes_all_identity_groups() {
        let (h, r, p) = scenario_draw(37);
        for c in verify_blockwise_inversion(&r).unwrap() {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.residual);
        }
        for c in verify_zf_zero_interference(&h, &r).unwrap() {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.residual);
        }
        for c in verify_effective_gain_chain(&r, &p).unwrap() {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.residual);
        }
        for c in verify_mmse_equivalences(&r, &p, 200, 99).unwrap() {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.residual);
        }
        for k in [0usize, 3, 7] {
            for c in verify_projection_kernel(k, &h, &r, 200, 7 + k as u64).unwrap() {
                assert!(c.passed(), "user {k} {}: {:.3e}", c.name, c.residual);
            }
            for c in verify_whitening(k, &h, &r, &p).unwrap() {
                assert!(c.passed(), "user {k} {}: {:.3e}", c.name, c.residual);
            }
        }
        let (table, checks) = verify_asymptotics(&r, &p, &default_scale_sweep()).unwrap();
        assert_eq!(table.len(), 9);
        for c in checks {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.residual);
        }
        // mid-sweep angles sit strictly between the two limits
        let mid = table[table.len() / 2];
        assert!(mid.angle_to_mrc > table[0].angle_to_mrc);
        assert!(mid.angle_to_zf > table[table.len() - 1].angle_to_zf);
    }

    #[test]
    fn two_user_projection_is_the_rank_one_projector() {
        // with one interferer the projection kernel is h2 h2^H / a2
        let sc = Scenario {
            users: 2,
            quad_order: 12,
            ..Scenario::default()
        };
        let grid = sc.grid().unwrap();
        let (_, h, r) = sc.channel_for_trial(8, 0, &grid).unwrap();
        let rows = vec![h.row(1)];
        let basis = KernelBasis::from_rows(&rows, &grid).unwrap();
        let (sub, _) = r.leave_one_out(0);
        let proj = KernelOperator::smooth_only(herm_inverse(&sub).unwrap());
        let h2 = h.row(1);
        let a2 = r.gain(1);
        for (i, j) in [(0usize, 0usize), (3, 80), (100, 17)] {
            let got = crate::kernels::eval_smooth(&basis, &proj, i, j);
            let expect = h2[i] * h2[j].conj() / a2;
            assert!(
                (got - expect).norm() < 1e-10 * expect.norm(),
                "({i},{j}): {got} vs {expect}"
            );
        }
        for c in verify_projection_kernel(0, &h, &r, 50, 1).unwrap() {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.residual);
        }
    }

    #[test]
    fn asymptotic_angles_vanish_for_orthogonal_users() {
        let m = CMat::from_fn(3, 3, |i, j| {
            if i == j {
                C64::new(1.0 + i as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let r = CorrelationMatrix::from_matrix(m).unwrap();
        let p = PowerProfile::uniform(3.0, 3).unwrap();
        let (table, checks) = verify_asymptotics(&r, &p, &default_scale_sweep()).unwrap();
        for row in &table {
            assert!(
                row.angle_to_mrc < 1e-12,
                "scale {}: {}",
                row.scale,
                row.angle_to_mrc
            );
            assert!(row.angle_to_zf < 1e-12);
        }
        for c in checks {
            assert!(c.passed());
        }
    }

    #[test]
    fn single_user_equivalences_collapse_to_matched_filtering() {
        let m = CMat::from_fn(1, 1, |_, _| C64::new(2.3, 0.0));
        let r = CorrelationMatrix::from_matrix(m).unwrap();
        let p = PowerProfile::uniform(5.0, 1).unwrap();
        for c in verify_mmse_equivalences(&r, &p, 100, 5).unwrap() {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.residual);
        }
        let reduced = reduced_mmse_coefficients(0, &r, &p).unwrap();
        assert_eq!(reduced[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn single_user_whitening_is_trivial() {
        let sc = Scenario {
            users: 1,
            ..Scenario::default()
        };
        let grid = sc.grid().unwrap();
        let (_, h, r) = sc.channel_for_trial(3, 0, &grid).unwrap();
        let p = sc.power_profile().unwrap();
        let checks = verify_whitening(0, &h, &r, &p).unwrap();
        for c in checks {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.residual);
            assert!(c.residual < 1e-12);
        }
    }

    #[test]
    fn injected_sign_error_is_caught() {
        // flipping the sign of the whitening coefficient must blow up the
        // sandwich identity by orders of magnitude
        let (h, r, _) = scenario_draw(41);
        let grid = h.grid().clone();
        let rows: Vec<Vec<C64>> = (0..r.dim()).map(|k| h.row(k)).collect();
        let basis = KernelBasis::from_rows(&rows, &grid).unwrap();
        let fam = operator_family(basis.gram()).unwrap();
        let corrupted = KernelOperator::from_coeff(&(-&fam.inv_sqrt_coeff));
        let sandwich = compose(
            basis.gram(),
            &compose(basis.gram(), &corrupted, &fam.covariance_kernel()).unwrap(),
            &corrupted,
        )
        .unwrap();
        let id = KernelOperator::identity(basis.dim());
        let scale = max_abs(&fam.inv_sqrt_coeff).max(1.0);
        let residual = sandwich.distance(&id) / scale;
        assert!(residual > 1e-3, "sign error went unnoticed: {residual:.3e}");
    }

    #[test]
    fn quick_suite_passes_and_counts_identities() {
        let cfg = SuiteConfig {
            random_instances: 6,
            scenario_draws: 1,
            probes: 50,
            quad_order: 20,
            ..SuiteConfig::default()
        };
        let report = run_full_suite(&cfg).unwrap();
        assert!(report.checks.len() >= 12, "only {}", report.checks.len());
        for c in &report.checks {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.max_residual);
        }
    }
}
