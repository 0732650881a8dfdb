//! The two-user MRC-vs-ZF tradeoff in closed form: sweeping the squared
//! channel correlation shows the ordering flip exactly at
//! `rho* = 1 - sigma^2 / (P_2 a_2)`.
//!
//! Run with `cargo run --example two_user_tradeoff`.

use capa::metrics::{mrc_beats_zf_threshold, two_user_closed_forms};

fn main() {
    let (a1, a2) = (2.0, 1.5);
    let (p1, p2) = (3.0, 4.0); // power-to-noise ratios
    let rho_star = mrc_beats_zf_threshold(p2, a2);
    println!("a1 = {a1}, a2 = {a2}, p1 = {p1}, p2 = {p2}");
    println!("predicted MRC-beats-ZF threshold: rho* = {rho_star:.6}");
    println!();
    println!("  rho   gamma_mrc   gamma_zf   gamma_mmse   leader");
    for i in 0..=19 {
        let rho = i as f64 * 0.05;
        let s = two_user_closed_forms(a1, a2, p1, p2, rho);
        let leader = if s.mrc > s.zf { "mrc" } else { "zf" };
        let marker = if (rho - rho_star).abs() < 0.025 {
            "  <- crossing"
        } else {
            ""
        };
        println!(
            "{rho:>5.2} {:>11.4} {:>10.4} {:>12.4}   {leader}{marker}",
            s.mrc, s.zf, s.mmse
        );
    }
    println!();
    let eps = 1e-6;
    let above = two_user_closed_forms(a1, a2, p1, p2, rho_star + eps);
    let below = two_user_closed_forms(a1, a2, p1, p2, rho_star - eps);
    println!(
        "at rho* - 1e-6: mrc - zf = {:+.3e};  at rho* + 1e-6: mrc - zf = {:+.3e}",
        below.mrc - below.zf,
        above.mrc - above.zf
    );
}
