//! Black-box tests of the `qpricer` binary: exit codes, determinism of the
//! CSV artifacts, and the printed summaries.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qpricer"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn selftest_exits_zero() {
    let out = run(&["selftest", "--seed", "3"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("selftest ok"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn unknown_subcommand_and_flag_exit_64() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["mc", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[market]\nvol = -1.0\n").unwrap();
    let out = run(&["mc", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    // Unknown keys are config errors too.
    std::fs::write(&path, "[market]\nstirke = 50.0\n").unwrap();
    let out = run(&["mc", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oversized_register_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("huge.toml");
    std::fs::write(&path, "[grid]\nqubits = 16\n[qae]\nphase_bits = 12\n").unwrap();
    let out = run(&["price-euro", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fig2_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(
        &cfg,
        r#"
[classical]
ks = [100, 1000, 10000]
trials = 8
[quantum_sweep]
phase_bits = [6, 8, 10]
trials = 8
"#,
    )
    .unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for (dirpath, _) in [(&out_a, 0), (&out_b, 1)] {
        let out = run(&[
            "fig2",
            "--seed",
            "7",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dirpath.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = read(&out_a.join("fig2.csv"));
    let b = read(&out_b.join("fig2.csv"));
    assert_eq!(a, b);
    assert!(a.starts_with("k,error_classical,error_quantum,bound_quantum\n"));
    assert_eq!(a.lines().count(), 1 + 3 + 3);
}

#[test]
fn price_euro_prints_the_full_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "price-euro",
        "--seed",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in [
        "price estimate",
        "analytic price",
        "eps bound",
        "nu (discretization)",
        "k_Q total",
    ] {
        assert!(text.contains(needle), "missing `{needle}` in:\n{text}");
    }
    let trace = read(&dir.path().join("trace.csv"));
    assert!(trace
        .starts_with("run_id,n,m,D,k_q,mu_hat,theta_hat,pi_hat,pi_analytic,nu_est,eps_bound\n"));
    // One row per repetition (D = 24 by default).
    assert_eq!(trace.lines().count(), 25);
}

#[test]
fn price_asian_writes_extended_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "price-asian",
        "--seed",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let trace = read(&dir.path().join("asian_trace.csv"));
    assert!(trace.starts_with(
        "run_id,n,m,D,k_q,mu_hat,theta_hat,pi_hat,pi_analytic,nu_est,eps_bound,L,m_per_period,kind\n"
    ));
    assert!(trace.contains("arithmetic"));
}

#[test]
fn fig1_csv_has_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fig1.toml");
    std::fs::write(&cfg, "[fig1]\npaths = 4\nsteps = 16\n").unwrap();
    let out = run(&[
        "fig1",
        "--seed",
        "5",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = read(&dir.path().join("fig1.csv"));
    assert!(text.starts_with("t,path_id,price\n"));
    assert_eq!(text.lines().count(), 1 + 4 * 17);
}

#[test]
fn mc_subcommand_reports_chebyshev_budget() {
    let out = run(&["mc", "--samples", "5000", "--seed", "9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Chebyshev"));
    assert!(text.contains("standard error"));
}

#[test]
fn qae_subcommand_reports_exact_and_estimated_mu() {
    let out = run(&["qae", "--seed", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("exact mu"));
    assert!(text.contains("mu_hat"));
    // The state dump appears only behind --out.
    assert!(!text.contains("state dump"));
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["qae", "--seed", "4", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let dump = read(&dir.path().join("state.csv"));
    assert!(dump.starts_with("basis_index,re,im\n"));
    // 2^(n+1) amplitudes for the default n = 8 grid plus the header.
    assert_eq!(dump.lines().count(), 513);
}

#[test]
fn fig3_emits_one_row_per_strike() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("f3.toml");
    std::fs::write(
        &cfg,
        r#"
[sweep]
strikes = [90.0, 110.0]
[quantum_sweep]
phase_bits = [6, 8, 10, 12]
trials = 8
"#,
    )
    .unwrap();
    let out = run(&[
        "fig3",
        "--seed",
        "6",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = read(&dir.path().join("fig3.csv"));
    assert!(text.starts_with("strike,zeta_q,zeta_c,ratio\n"));
    assert_eq!(text.lines().count(), 3);
}
