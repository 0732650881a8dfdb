//! Command-line driver: seeded Monte Carlo sweeps (CSV out) and the
//! operator-identity verification suite.
//!
//! Exit codes: 0 on success, 1 on verification failure or runtime error,
//! 2 on usage or configuration errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use capa::beamforming::Scheme;
use capa::experiment::{csv_string, run_sweep, ArrayKind, ExperimentConfig, SweepKind};
use capa::identities::{run_full_suite, SuiteConfig, SuiteReport};
use capa::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "capa",
    version,
    about = "Linear receive beamforming for continuous aperture arrays: \
             Monte Carlo sweeps and identity verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the per-user transmit power and emit mean sum-rate/MSE CSV
    SweepPower(SweepArgs),
    /// Sweep the number of users
    SweepUsers(SweepArgs),
    /// Sweep the aperture area
    SweepAperture(SweepArgs),
    /// Run the numerical identity verification suite
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// TOML config file (flat keys, see README); flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Monte Carlo seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of channel draws per sweep value
    #[arg(long)]
    trials: Option<usize>,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gauss quadrature order per axis
    #[arg(long)]
    quad_order: Option<usize>,
    /// Comma-separated subset of {capa, spda}
    #[arg(long, value_delimiter = ',')]
    arrays: Option<Vec<String>>,
    /// Comma-separated subset of {mrc, zf, mmse}
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Seed for the random instances and channel draws
    #[arg(long)]
    seed: Option<u64>,
    /// Gauss quadrature order per axis
    #[arg(long)]
    quad_order: Option<usize>,
    /// Override every identity tolerance with this value
    #[arg(long)]
    tolerance: Option<f64>,
    /// Number of random positive-definite instances
    #[arg(long)]
    instances: Option<usize>,
    /// Number of reference-scenario channel draws
    #[arg(long)]
    draws: Option<usize>,
    /// Random perturbation probes for the optimality check
    #[arg(long)]
    probes: Option<usize>,
}

fn build_config(args: &SweepArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(order) = args.quad_order {
        cfg.quad_order = order;
    }
    if let Some(arrays) = &args.arrays {
        cfg.arrays = arrays
            .iter()
            .map(|s| ArrayKind::parse(s))
            .collect::<Result<Vec<_>>>()?;
    }
    if let Some(schemes) = &args.schemes {
        cfg.schemes = schemes
            .iter()
            .map(|s| Scheme::parse(s))
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(cfg)
}

fn run_sweep_command(kind: SweepKind, args: &SweepArgs) -> Result<()> {
    let cfg = build_config(args)?;
    let rows = run_sweep(&cfg, kind)?;
    let text = csv_string(&rows);
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn print_report(report: &SuiteReport) {
    let width = report
        .checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(8)
        .max("identity".len());
    println!(
        "{:<width$}  {:>13}  {:>10}  status",
        "identity", "max residual", "tolerance"
    );
    for c in &report.checks {
        println!(
            "{:<width$}  {:>13.3e}  {:>10.1e}  {}",
            c.name,
            c.max_residual,
            c.tolerance,
            if c.passed() { "pass" } else { "FAIL" },
        );
    }
    println!(
        "checked {} identities on {} random instances and {} channel draws",
        report.checks.len(),
        report.random_instances,
        report.scenario_draws
    );
}

fn run_verify_command(args: &VerifyArgs) -> Result<bool> {
    let mut cfg = SuiteConfig::default();
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(order) = args.quad_order {
        cfg.quad_order = order;
    }
    if let Some(instances) = args.instances {
        cfg.random_instances = instances;
    }
    if let Some(draws) = args.draws {
        cfg.scenario_draws = draws;
    }
    if let Some(probes) = args.probes {
        cfg.probes = probes;
    }
    cfg.tolerance_override = args.tolerance;
    let report = run_full_suite(&cfg)?;
    print_report(&report);
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SweepPower(args) => run_sweep_command(SweepKind::Power, args).map(|_| true),
        Command::SweepUsers(args) => run_sweep_command(SweepKind::Users, args).map(|_| true),
        Command::SweepAperture(args) => run_sweep_command(SweepKind::Aperture, args).map(|_| true),
        Command::Verify(args) => run_verify_command(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e @ (Error::Config(_) | Error::InvalidParameter(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
