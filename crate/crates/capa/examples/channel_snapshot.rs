//! Draw one random channel realization and inspect it: user positions,
//! per-user channel gains, and the squared correlation coefficients that
//! drive every beamformer.
//!
//! Run with `cargo run --example channel_snapshot`.

use capa::quadrature::correlation_coefficient;
use capa::scenario::Scenario;

fn main() -> capa::Result<()> {
    let sc = Scenario::default();
    let grid = sc.grid()?;
    let (layout, _, r) = sc.channel_for_trial(7, 0, &grid)?;

    println!(
        "aperture {:.2} x {:.2} m, {} users, wavelength {:.4} m, quadrature {}x{}",
        sc.aperture.lx(),
        sc.aperture.ly(),
        sc.users,
        sc.wave.wavelength(),
        sc.quad_order,
        sc.quad_order
    );
    println!();
    println!("user        x        y        z   distance   gain a_k");
    for k in 0..layout.num_users() {
        let p = layout.position(k);
        println!(
            "{k:>4} {:>8.3} {:>8.3} {:>8.3} {:>10.3} {:>10.4}",
            p.x,
            p.y,
            p.z,
            p.norm(),
            r.gain(k)
        );
    }

    println!();
    println!("squared correlation coefficients rho[k1][k2]:");
    print!("     ");
    for k in 0..r.dim() {
        print!("{k:>8}");
    }
    println!();
    for k1 in 0..r.dim() {
        print!("{k1:>4} ");
        for k2 in 0..r.dim() {
            print!("{:>8.4}", correlation_coefficient(&r, k1, k2)?);
        }
        println!();
    }
    Ok(())
}
