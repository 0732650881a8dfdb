//! The optimal receiver as a cascade: whiten the interference-plus-noise
//! field with the inverse-square-root kernel of its covariance, then
//! matched-filter the whitened channel. The resulting SINR equals the
//! closed-form MMSE value for every user.
//!
//! Run with `cargo run --example whitened_receiver`.

use capa::beamforming::Scheme;
use capa::kernels::{apply, operator_family, KernelBasis};
use capa::metrics::sinr_closed_form;
use capa::quadrature::inner_product;
use capa::scenario::Scenario;

fn main() -> capa::Result<()> {
    let sc = Scenario::default();
    let grid = sc.grid()?;
    let (_, h, r) = sc.channel_for_trial(9, 0, &grid)?;
    let p = sc.power_profile()?;

    println!("user   two-stage SINR   closed-form MMSE   rel diff");
    for k in 0..r.dim() {
        // power-weighted interferer basis sqrt(p_k') h_k'
        let rows: Vec<Vec<_>> = (0..r.dim())
            .filter(|&i| i != k)
            .map(|i| {
                let s = p.ratio(i).sqrt();
                h.row(i).into_iter().map(|z| z * s).collect()
            })
            .collect();
        let basis = KernelBasis::from_rows(&rows, &grid)?;
        let family = operator_family(basis.gram())?;
        let whitener = family.inv_sqrt_kernel();

        // stage 1: whiten the desired channel; stage 2: matched filter
        let whitened = apply(&basis, &whitener, &h.row(k))?;
        let energy = inner_product(&whitened, &whitened, &grid)?.re;
        let two_stage = p.ratio(k) * energy;

        let closed = sinr_closed_form(Scheme::Mmse, &r, &p, k)?;
        println!(
            "{k:>4} {:>16.6} {:>18.6} {:>10.2e}",
            two_stage,
            closed,
            ((two_stage - closed) / closed).abs()
        );
    }
    Ok(())
}
