//! Watch the MMSE weight matrix slide between its two extremes: matched
//! filtering at low SNR and zero forcing at high SNR. The table lists the
//! worst-case principal angle (over users) between the MMSE columns and
//! each extreme as the SNR scale sweeps eight orders of magnitude.
//!
//! Run with `cargo run --example mmse_asymptotics`.

use capa::identities::verify_asymptotics;
use capa::scenario::Scenario;

fn main() -> capa::Result<()> {
    let sc = Scenario::default();
    let grid = sc.grid()?;
    let (_, _, r) = sc.channel_for_trial(3, 0, &grid)?;
    let p = sc.power_profile()?;
    let scales: Vec<f64> = (-8..=8).map(|e| 10f64.powi(e)).collect();
    let (table, checks) = verify_asymptotics(&r, &p, &scales)?;

    println!("SNR scale    angle to MRC (rad)    angle to ZF (rad)");
    for row in &table {
        println!(
            "{:>9.0e} {:>21.6e} {:>20.6e}",
            row.scale, row.angle_to_mrc, row.angle_to_zf
        );
    }
    println!();
    for c in &checks {
        println!(
            "{:<24} residual {:>10.3e}  {}",
            c.name,
            c.residual,
            if c.passed() { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
