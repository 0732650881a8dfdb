//! End-to-end checks of the `capa` binary: exit codes, config handling,
//! CSV output, and independence from the worker thread count.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_capa"))
}

#[test]
fn verify_quick_run_exits_zero_and_lists_identities() {
    let out = bin()
        .args([
            "verify",
            "--instances",
            "4",
            "--draws",
            "1",
            "--probes",
            "20",
        ])
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    let listed = stdout.lines().filter(|l| l.ends_with("pass")).count();
    assert!(listed >= 12, "only {listed} identities listed:\n{stdout}");
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn impossible_tolerance_fails_verification_with_exit_one() {
    let out = bin()
        .args([
            "verify",
            "--instances",
            "2",
            "--draws",
            "1",
            "--probes",
            "10",
            "--tolerance",
            "1e-30",
        ])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("FAIL"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin()
        .args(["sweep-power", "--no-such-flag"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = bin()
        .args(["sweep-power", "--config", "/nonexistent/capa.toml"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config"));
}

#[test]
fn config_file_flags_and_out_path_work_together() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.toml");
    std::fs::write(
        &config_path,
        "trials = 2\nquad_order = 8\narrays = [\"capa\"]\nschemes = [\"zf\"]\n\
         sweep_values = [0.04, 0.4]\nseed = 11\n",
    )
    .unwrap();
    let csv_path = dir.path().join("rows.csv");
    let out = bin()
        .args(["sweep-power", "--config"])
        .arg(&config_path)
        .args(["--trials", "1", "--out"])
        .arg(&csv_path)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3); // header + 2 sweep values x 1 array x 1 scheme
    assert!(lines[0].starts_with("sweep,value,array,scheme"));
    // the --trials flag overrode the config file
    for line in &lines[1..] {
        assert!(line.ends_with(",1,11"), "row: {line}");
        assert!(line.contains(",capa,zf,"));
    }
}

#[test]
fn invalid_config_value_is_rejected_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    std::fs::write(&config_path, "trials = 0\n").unwrap();
    let out = bin()
        .args(["sweep-power", "--config"])
        .arg(&config_path)
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));
}

#[test]
fn csv_bytes_do_not_depend_on_the_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.toml");
    std::fs::write(
        &config_path,
        "trials = 4\nquad_order = 8\nsweep_values = [2.0, 4.0]\n",
    )
    .unwrap();
    let run = |threads: &str| {
        let out = bin()
            .args(["sweep-users", "--config"])
            .arg(&config_path)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("4"));
}
