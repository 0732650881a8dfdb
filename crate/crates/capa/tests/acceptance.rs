//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).
//!
//! The criteria are property-based: closed-form cross-checks, dominance
//! orderings, operator-identity residuals, qualitative Monte Carlo trends,
//! and byte-level determinism of the CSV output.

use std::time::Instant;

use capa::beamforming::{
    beamformer_coefficients, coefficient_samples, mmse_weights, mrc_weights, scalar_filter,
    zf_weights, PowerProfile, Scheme, WeightMatrix,
};
use capa::experiment::{csv_string, run_sweep, ArrayKind, ExperimentConfig, ResultRow, SweepKind};
use capa::identities::{
    run_full_suite, verify_asymptotics, verify_zf_zero_interference, SuiteConfig,
};
use capa::metrics::{
    mrc_beats_zf_threshold, performance_bounds, report, sinr_closed_form, sinr_generic,
    two_user_closed_forms,
};
use capa::quadrature::{inner_product, CorrelationMatrix};
use capa::scenario::Scenario;
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type C64 = Complex<f64>;

fn criterion(name: &str, ok: bool, detail: &str) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

#[test]
fn criterion_1_zf_zero_interference() {
    let start = Instant::now();
    let sc = Scenario::default();
    let grid = sc.grid().unwrap();
    let mut worst_off = 0.0f64;
    let mut worst_diag = 0.0f64;
    for draw in 0..20u64 {
        let (_, h, r) = sc.channel_for_trial(101, draw, &grid).unwrap();
        for check in verify_zf_zero_interference(&h, &r).unwrap() {
            match check.name {
                "zf_zero_interference" => worst_off = worst_off.max(check.residual),
                "zf_unit_response" => worst_diag = worst_diag.max(check.residual),
                other => panic!("unexpected check {other}"),
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    criterion(
        "criterion 1 (ZF zero interference)",
        worst_off < 1e-8 && worst_diag < 1e-8 && elapsed < 10.0,
        &format!(
            "max normalized cross response {worst_off:.3e}, max diagonal deviation \
             {worst_diag:.3e}, {elapsed:.2} s over 20 draws"
        ),
    );
}

#[test]
fn criterion_2_sinr_dominance_and_bounds() {
    let sc = Scenario::default();
    let grid = sc.grid().unwrap();
    let p = sc.power_profile().unwrap();
    let tol = 1.0 + 1e-9;
    let mut ok = true;
    let mut worst = 0.0f64;
    for trial in 0..50u64 {
        let (_, _, r) = sc.channel_for_trial(202, trial, &grid).unwrap();
        let bounds = performance_bounds(&r, &p).unwrap();
        for (k, bound) in bounds.iter().enumerate() {
            let mrc = sinr_closed_form(Scheme::Mrc, &r, &p, k).unwrap();
            let zf = sinr_closed_form(Scheme::Zf, &r, &p, k).unwrap();
            let mmse = sinr_closed_form(Scheme::Mmse, &r, &p, k).unwrap();
            ok &= mrc <= mmse * tol && zf <= mmse * tol && mmse <= bound.gamma_max * tol;
            worst = worst
                .max(mrc / mmse - 1.0)
                .max(zf / mmse - 1.0)
                .max(mmse / bound.gamma_max - 1.0);
        }
    }
    criterion(
        "criterion 2 (SINR dominance and bounds)",
        ok,
        &format!("50 trials x 8 users, worst ordering excess {worst:.3e}"),
    );
}

#[test]
fn criterion_3_closed_form_vs_generic_vs_quadrature() {
    let sc = Scenario::default();
    let grid = sc.grid().unwrap();
    let p = sc.power_profile().unwrap();
    let mut worst_generic = 0.0f64;
    let mut worst_direct = 0.0f64;
    for draw in 0..5u64 {
        let (_, h, r) = sc.channel_for_trial(303, draw, &grid).unwrap();
        let weights = [
            mrc_weights(r.dim()),
            zf_weights(&r).unwrap(),
            mmse_weights(&r, &p).unwrap(),
        ];
        for w in &weights {
            for k in 0..r.dim() {
                let closed = sinr_closed_form(w.scheme(), &r, &p, k).unwrap();
                let generic = sinr_generic(w, &r, &p, k).unwrap();
                worst_generic = worst_generic.max(((generic - closed) / closed).abs());

                // direct quadrature evaluation of the SINR integrals
                let samples = capa::beamforming::beamformer_samples(w, &h, k).unwrap();
                let mut interference = 0.0;
                for k2 in 0..r.dim() {
                    if k2 != k {
                        let cross = inner_product(&samples, &h.row(k2), &grid).unwrap();
                        interference += p.ratio(k2) * cross.norm_sqr();
                    }
                }
                let norm = inner_product(&samples, &samples, &grid).unwrap().re;
                let signal = p.ratio(k)
                    * inner_product(&samples, &h.row(k), &grid)
                        .unwrap()
                        .norm_sqr();
                let direct = signal / (interference + norm);
                worst_direct = worst_direct.max(((direct - closed) / closed).abs());
            }
        }
    }
    criterion(
        "criterion 3 (closed form vs generic vs quadrature)",
        worst_generic < 1e-9 && worst_direct < 1e-9,
        &format!(
            "worst generic mismatch {worst_generic:.3e}, worst direct-integral mismatch \
             {worst_direct:.3e}"
        ),
    );
}

#[test]
fn criterion_4_identity_suite() {
    let start = Instant::now();
    let report = run_full_suite(&SuiteConfig::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mut detail = String::new();
    let mut ok = report.checks.len() >= 12;
    for c in &report.checks {
        if !c.passed() {
            ok = false;
            detail.push_str(&format!("{} residual {:.3e}; ", c.name, c.max_residual));
        }
    }
    ok &= elapsed < 60.0;
    criterion(
        "criterion 4 (identity suite)",
        ok,
        &format!(
            "{} identities on {} random instances + {} channel draws in {elapsed:.2} s {detail}",
            report.checks.len(),
            report.random_instances,
            report.scenario_draws
        ),
    );
}

#[test]
fn criterion_5_two_user_cross_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    let mut flips_ok = true;
    let mut checked_flips = 0usize;
    for _ in 0..1000 {
        let a1 = 0.1 + 10.0 * rng.random::<f64>();
        let a2 = 0.1 + 10.0 * rng.random::<f64>();
        let p1 = 0.1 + 50.0 * rng.random::<f64>();
        let p2 = 0.1 + 50.0 * rng.random::<f64>();
        let rho = 0.98 * rng.random::<f64>();
        let phase = std::f64::consts::TAU * (rng.random::<f64>() - 0.5);

        // general K = 2 matrix formulas on a synthetic correlation matrix
        let r12 = C64::from_polar((rho * a1 * a2).sqrt(), phase);
        let m = DMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new(a1, 0.0),
            (1, 1) => C64::new(a2, 0.0),
            (0, 1) => r12,
            _ => r12.conj(),
        });
        let r = CorrelationMatrix::from_matrix(m).unwrap();
        let p = PowerProfile::new(vec![p1, p2]).unwrap();
        let closed = two_user_closed_forms(a1, a2, p1, p2, rho);
        for (c, general) in [
            (
                closed.mrc,
                sinr_closed_form(Scheme::Mrc, &r, &p, 0).unwrap(),
            ),
            (closed.zf, sinr_closed_form(Scheme::Zf, &r, &p, 0).unwrap()),
            (
                closed.mmse,
                sinr_closed_form(Scheme::Mmse, &r, &p, 0).unwrap(),
            ),
        ] {
            worst = worst.max(((c - general) / general).abs());
        }

        // ordering flips exactly at the predicted correlation threshold
        let rho_star = mrc_beats_zf_threshold(p2, a2);
        if rho_star > 1e-5 && rho_star < 1.0 - 1e-5 {
            checked_flips += 1;
            let above = two_user_closed_forms(a1, a2, p1, p2, rho_star + 1e-6);
            let below = two_user_closed_forms(a1, a2, p1, p2, rho_star - 1e-6);
            flips_ok &= above.mrc > above.zf && below.mrc < below.zf;
        }
    }
    criterion(
        "criterion 5 (two-user closed forms)",
        worst < 1e-12 && flips_ok && checked_flips > 100,
        &format!(
            "1000 tuples, worst closed-vs-matrix mismatch {worst:.3e}, \
             {checked_flips} threshold flips exact"
        ),
    );
}

#[test]
fn criterion_6_asymptotic_limits() {
    let sc = Scenario::default();
    let grid = sc.grid().unwrap();
    let p = sc.power_profile().unwrap();
    let scales: Vec<f64> = (-8..=8).step_by(2).map(|e| 10f64.powi(e)).collect();
    let mut worst_low = 0.0f64;
    let mut worst_high = 0.0f64;
    let mut worst_mono = 0.0f64;
    for draw in 0..20u64 {
        let (_, _, r) = sc.channel_for_trial(606, draw, &grid).unwrap();
        let (_, checks) = verify_asymptotics(&r, &p, &scales).unwrap();
        for c in checks {
            match c.name {
                "mmse_low_snr_limit" => worst_low = worst_low.max(c.residual),
                "mmse_high_snr_limit" => worst_high = worst_high.max(c.residual),
                "mmse_limit_monotonicity" => worst_mono = worst_mono.max(c.residual),
                other => panic!("unexpected check {other}"),
            }
        }
    }
    criterion(
        "criterion 6 (MMSE asymptotics)",
        worst_low < 1e-3 && worst_high < 1e-3 && worst_mono < 1e-9,
        &format!(
            "20 draws: angle to MRC at 1e-8 scale {worst_low:.3e} rad, angle to ZF at 1e8 \
             scale {worst_high:.3e} rad, monotonicity violation {worst_mono:.3e}"
        ),
    );
}

fn row(rows: &[ResultRow], value: f64, array: ArrayKind, scheme: Scheme) -> &ResultRow {
    rows.iter()
        .find(|r| {
            (r.value - value).abs() < 1e-12 * value.abs().max(1.0)
                && r.array == array
                && r.scheme == scheme
        })
        .unwrap_or_else(|| panic!("missing row {value} {array} {scheme}"))
}

#[test]
fn criterion_7_trend_reproduction() {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        seed: 707,
        trials: 50,
        ..ExperimentConfig::default()
    };
    let power_values = cfg.default_sweep_values(SweepKind::Power);
    let power_rows = run_sweep(&cfg, SweepKind::Power).unwrap();
    let users_rows = run_sweep(&cfg, SweepKind::Users).unwrap();
    let aperture_rows = run_sweep(&cfg, SweepKind::Aperture).unwrap();

    // (a) continuous aperture beats the lattice under ZF and MMSE at every
    // swept power
    let mut capa_beats_spda = true;
    for &v in &power_values {
        for scheme in [Scheme::Zf, Scheme::Mmse] {
            let capa = row(&power_rows, v, ArrayKind::Capa, scheme).mean_sum_rate;
            let spda = row(&power_rows, v, ArrayKind::Spda, scheme).mean_sum_rate;
            capa_beats_spda &= capa > spda;
        }
    }

    // (b) MRC saturates while ZF/MMSE keep a full K log2(10) per decade
    let p100 = 100.0 * cfg.power;
    let p1000 = 1000.0 * cfg.power;
    let mrc_lo = row(&power_rows, p100, ArrayKind::Capa, Scheme::Mrc).mean_sum_rate;
    let mrc_hi = row(&power_rows, p1000, ArrayKind::Capa, Scheme::Mrc).mean_sum_rate;
    let mrc_gain = (mrc_hi - mrc_lo) / mrc_lo;
    let mut decade_ok = mrc_gain < 0.05;
    let expected_decade = cfg.users as f64 * 10f64.log2();
    let mut decade_detail = String::new();
    for scheme in [Scheme::Zf, Scheme::Mmse] {
        let lo = row(&power_rows, p100, ArrayKind::Capa, scheme).mean_sum_rate;
        let hi = row(&power_rows, p1000, ArrayKind::Capa, scheme).mean_sum_rate;
        let gain = hi - lo;
        decade_ok &= (gain / expected_decade - 1.0).abs() < 0.15;
        decade_detail.push_str(&format!("{scheme} decade gain {gain:.2} b/s/Hz, "));
    }

    // (c) ZF sum-rate vs user count rises then falls
    let user_values = cfg.default_sweep_values(SweepKind::Users);
    let zf_by_users: Vec<f64> = user_values
        .iter()
        .map(|&v| row(&users_rows, v, ArrayKind::Capa, Scheme::Zf).mean_sum_rate)
        .collect();
    let peak = zf_by_users
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let rise_fall = peak > 0
        && peak + 1 < zf_by_users.len()
        && zf_by_users[0] < zf_by_users[peak]
        && *zf_by_users.last().unwrap() < zf_by_users[peak];

    // (d) sum-MSE decreases in power for every array and scheme
    let mut mse_decreasing = true;
    for array in [ArrayKind::Capa, ArrayKind::Spda] {
        for scheme in Scheme::ALL {
            let series: Vec<f64> = power_values
                .iter()
                .map(|&v| row(&power_rows, v, array, scheme).mean_sum_mse)
                .collect();
            mse_decreasing &= series.windows(2).all(|w| w[1] < w[0]);
        }
    }

    // (e) every sum-rate increases with the aperture area
    let aperture_values = cfg.default_sweep_values(SweepKind::Aperture);
    let mut rate_increasing = true;
    for array in [ArrayKind::Capa, ArrayKind::Spda] {
        for scheme in Scheme::ALL {
            let series: Vec<f64> = aperture_values
                .iter()
                .map(|&v| row(&aperture_rows, v, array, scheme).mean_sum_rate)
                .collect();
            rate_increasing &= series.windows(2).all(|w| w[1] > w[0]);
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    criterion(
        "criterion 7 (trend reproduction)",
        capa_beats_spda
            && decade_ok
            && rise_fall
            && mse_decreasing
            && rate_increasing
            && elapsed < 600.0,
        &format!(
            "capa>spda {capa_beats_spda}, MRC saturation gain {mrc_gain:.3}, {decade_detail}\
             ZF-vs-K peak at K={} of {:?}, MSE decreasing {mse_decreasing}, rates increasing \
             in aperture {rate_increasing}, {elapsed:.1} s",
            user_values[peak], user_values
        ),
    );
}

#[test]
fn criterion_8_mse_identity_and_scalar_filters() {
    let sc = Scenario::default();
    let grid = sc.grid().unwrap();
    let p = sc.power_profile().unwrap();
    let powers = vec![sc.power; sc.users];

    // MSE * (1 + gamma) = 1 across 50 trials, all schemes and users
    let mut worst_identity = 0.0f64;
    for trial in 0..50u64 {
        let (_, _, r) = sc.channel_for_trial(808, trial, &grid).unwrap();
        for scheme in Scheme::ALL {
            let rep = report(scheme, &r, &p).unwrap();
            for k in 0..r.dim() {
                worst_identity =
                    worst_identity.max((rep.mse[k] * (1.0 + rep.gamma[k]) - 1.0).abs());
            }
        }
    }

    // quadrature-evaluated optimal filter equals the closed forms
    let mut worst_beta = 0.0f64;
    for draw in 0..5u64 {
        let (_, h, r) = sc.channel_for_trial(809, draw, &grid).unwrap();
        for scheme in Scheme::ALL {
            for k in 0..r.dim() {
                let coeff = beamformer_coefficients(scheme, k, &r, &p).unwrap();
                let w = coefficient_samples(&coeff, &h).unwrap();
                let mut denom = 0.0;
                for (k2, pw) in powers.iter().enumerate() {
                    let cross = inner_product(&w, &h.row(k2), &grid).unwrap();
                    denom += pw * cross.norm_sqr();
                }
                denom += sc.noise_variance * inner_product(&w, &w, &grid).unwrap().re;
                let numer = powers[k].sqrt() * inner_product(&h.row(k), &w, &grid).unwrap().re;
                let generic = numer / denom;
                let closed = scalar_filter(scheme, k, &r, &powers, sc.noise_variance).unwrap();
                worst_beta = worst_beta.max(((generic - closed) / closed).abs());
            }
        }
    }
    criterion(
        "criterion 8 (MSE identity and scalar filters)",
        worst_identity < 1e-12 && worst_beta < 1e-10,
        &format!(
            "worst MSE identity defect {worst_identity:.3e}, worst generic-vs-closed filter \
             mismatch {worst_beta:.3e}"
        ),
    );
}

#[test]
fn criterion_9_csv_determinism() {
    let cfg = ExperimentConfig {
        seed: 909,
        trials: 50,
        ..ExperimentConfig::default()
    };
    let first = csv_string(&run_sweep(&cfg, SweepKind::Power).unwrap());
    let second = csv_string(&run_sweep(&cfg, SweepKind::Power).unwrap());
    let users_a = csv_string(&run_sweep(&cfg, SweepKind::Users).unwrap());
    let users_b = csv_string(&run_sweep(&cfg, SweepKind::Users).unwrap());
    criterion(
        "criterion 9 (CSV determinism)",
        first == second && users_a == users_b && first.len() > 100,
        &format!(
            "power sweep {} bytes identical across runs, users sweep {} bytes identical",
            first.len(),
            users_a.len()
        ),
    );
}

// the generic SINR's scale invariance backs criterion 3's tolerance: the
// weight matrices may be rescaled arbitrarily without moving any SINR
#[test]
fn scale_invariance_of_weight_columns() {
    let sc = Scenario::default();
    let grid = sc.grid().unwrap();
    let (_, _, r) = sc.channel_for_trial(42, 0, &grid).unwrap();
    let p = sc.power_profile().unwrap();
    let w = mmse_weights(&r, &p).unwrap();
    let scaled = WeightMatrix::from_matrix(w.matrix() * C64::new(0.0, -3.25), Scheme::Mmse);
    for k in 0..r.dim() {
        let a = sinr_generic(&w, &r, &p, k).unwrap();
        let b = sinr_generic(&scaled, &r, &p, k).unwrap();
        assert!(((a - b) / a).abs() < 1e-12);
    }
}
