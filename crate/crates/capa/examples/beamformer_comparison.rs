//! Compare the three combiners on one channel draw: per-user SINR against
//! the interference-free bound, per-scheme sum-rate and sum-MSE, and the
//! MSE-optimal scalar filters.
//!
//! Run with `cargo run --example beamformer_comparison`.

use capa::beamforming::{scalar_filters, Scheme};
use capa::metrics::{performance_bounds, report};
use capa::scenario::Scenario;

fn main() -> capa::Result<()> {
    let sc = Scenario::default();
    let grid = sc.grid()?;
    let (_, _, r) = sc.channel_for_trial(12, 0, &grid)?;
    let p = sc.power_profile()?;

    let reports = [Scheme::Mrc, Scheme::Zf, Scheme::Mmse]
        .map(|scheme| report(scheme, &r, &p).expect("valid draw"));
    let bounds = performance_bounds(&r, &p)?;

    println!("per-user SINR (linear):");
    println!("user      mrc       zf     mmse    bound p*a");
    for (k, bound) in bounds.iter().enumerate() {
        println!(
            "{k:>4} {:>8.3} {:>8.3} {:>8.3} {:>10.3}",
            reports[0].gamma[k], reports[1].gamma[k], reports[2].gamma[k], bound.gamma_max
        );
    }

    println!();
    println!("scheme   sum-rate (b/s/Hz)   sum-MSE");
    for rep in &reports {
        println!(
            "{:>6} {:>19.3} {:>9.4}",
            rep.scheme, rep.sum_rate, rep.sum_mse
        );
    }

    let powers = vec![sc.power; sc.users];
    println!();
    println!("MSE-optimal scalar filters beta_k:");
    println!("user        mrc          zf        mmse");
    let filters = [
        scalar_filters(Scheme::Mrc, &r, &powers, sc.noise_variance)?,
        scalar_filters(Scheme::Zf, &r, &powers, sc.noise_variance)?,
        scalar_filters(Scheme::Mmse, &r, &powers, sc.noise_variance)?,
    ];
    for k in 0..r.dim() {
        println!(
            "{k:>4} {:>11.5} {:>11.5} {:>11.5}",
            filters[0].beta(k),
            filters[1].beta(k),
            filters[2].beta(k)
        );
    }
    Ok(())
}
