//! Run the operator-identity verification suite on a small batch and print
//! the worst residual per identity: blockwise inversion, projection
//! kernels, square-root/whitening kernels, MMSE form equivalences, and the
//! SNR-limit sweep. The CLI `verify` subcommand runs the full batch.
//!
//! Run with `cargo run --example operator_identities`.

use capa::identities::{run_full_suite, SuiteConfig};

fn main() -> capa::Result<()> {
    let cfg = SuiteConfig {
        random_instances: 20,
        scenario_draws: 3,
        probes: 200,
        ..SuiteConfig::default()
    };
    let report = run_full_suite(&cfg)?;
    println!(
        "{} identities, {} random instances, {} channel draws",
        report.checks.len(),
        report.random_instances,
        report.scenario_draws
    );
    println!();
    for c in &report.checks {
        println!(
            "{:<30} residual {:>10.3e}  tolerance {:>8.1e}  {}",
            c.name,
            c.max_residual,
            c.tolerance,
            if c.passed() { "pass" } else { "FAIL" }
        );
    }
    println!();
    println!("all passed: {}", report.all_passed());
    Ok(())
}
