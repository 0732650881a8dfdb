//! Run a small power sweep through the experiment driver and print the CSV
//! it would write — the same output as
//! `capa sweep-power --trials 10 --seed 42`.
//!
//! Run with `cargo run --example power_sweep_csv`.

use capa::experiment::{csv_string, run_sweep, ExperimentConfig, SweepKind};

fn main() -> capa::Result<()> {
    let cfg = ExperimentConfig {
        seed: 42,
        trials: 10,
        ..ExperimentConfig::default()
    };
    let rows = run_sweep(&cfg, SweepKind::Power)?;
    print!("{}", csv_string(&rows));
    Ok(())
}
