//! Continuous aperture versus half-wavelength lattice on a fixed-seed
//! Monte Carlo batch: mean sum-rates and sum-MSEs per scheme. Under ZF and
//! MMSE the continuous surface wins; under MRC the lattice can win once
//! interference dominates.
//!
//! Run with `cargo run --example capa_vs_spda`.

use capa::beamforming::{PowerProfile, Scheme};
use capa::metrics::report;
use capa::quadrature::{ChannelMatrix, CorrelationMatrix};
use capa::scenario::Scenario;
use capa::spda::{half_wavelength_array, spda_channels};

fn main() -> capa::Result<()> {
    let sc = Scenario::default();
    let grid = sc.grid()?;
    let array = half_wavelength_array(&sc.aperture, &sc.wave)?;
    let trials = 50u64;

    println!(
        "{} trials, {} users, lattice of {} elements at {:.4} m spacing",
        trials,
        sc.users,
        array.num_elements(),
        array.spacing()
    );

    let mut rate = [[0.0f64; 3]; 2]; // [array][scheme]
    let mut mse = [[0.0f64; 3]; 2];
    for trial in 0..trials {
        let layout = sc.layout_for_trial(2024, trial)?;
        let p = PowerProfile::from_layout(&layout)?;
        let h = ChannelMatrix::sample(&layout, &sc.wave, &grid)?;
        let r_capa = CorrelationMatrix::from_channel(&h)?;
        let r_spda = spda_channels(&layout, &sc.wave, &array)?
            .correlation()
            .clone();
        for (ai, r) in [&r_capa, &r_spda].into_iter().enumerate() {
            for (si, scheme) in Scheme::ALL.into_iter().enumerate() {
                let rep = report(scheme, r, &p)?;
                rate[ai][si] += rep.sum_rate / trials as f64;
                mse[ai][si] += rep.sum_mse / trials as f64;
            }
        }
    }

    println!();
    println!("mean sum-rate (b/s/Hz):");
    println!("array       mrc       zf     mmse");
    for (ai, name) in ["capa", "spda"].iter().enumerate() {
        println!(
            "{name:>5} {:>9.3} {:>8.3} {:>8.3}",
            rate[ai][0], rate[ai][1], rate[ai][2]
        );
    }
    println!();
    println!("mean sum-MSE:");
    println!("array       mrc       zf     mmse");
    for (ai, name) in ["capa", "spda"].iter().enumerate() {
        println!(
            "{name:>5} {:>9.4} {:>8.4} {:>8.4}",
            mse[ai][0], mse[ai][1], mse[ai][2]
        );
    }
    Ok(())
}
