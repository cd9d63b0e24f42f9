//! End-to-end harness tests: reproduction targets against their golden
//! checks, the committed config files, artifact determinism, and the binary's
//! exit codes.

use rfrk_cli::config::{parse_config_file, ConfigOverlay};
use rfrk_cli::converge::{convergence_table, ConvergeSpec};
use rfrk_cli::reproduce::{reproduce, write_report, Target};
use rfrk_cli::runner::run;
use std::path::{Path, PathBuf};
use std::process::Command;

fn repo_configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rfrk"))
}

#[test]
fn reproduce_table1_passes_golden_checks() {
    let dir = tempfile::tempdir().unwrap();
    let report = reproduce(Target::Table1, dir.path()).unwrap();
    assert!(
        report.all_pass(),
        "failing checks: {:?}",
        report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
    );
    let table = std::fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 4, "four table rows");

    let report_path = dir.path().join("table1_report.txt");
    write_report(&report, &report_path).unwrap();
    let text = std::fs::read_to_string(report_path).unwrap();
    assert!(text.ends_with("overall: PASS\n"));
    assert!(text.contains("R-RK44 first effective dt from 0.5"));
}

#[test]
fn reproduce_fig7_passes_golden_checks() {
    let dir = tempfile::tempdir().unwrap();
    let report = reproduce(Target::Fig7, dir.path()).unwrap();
    assert!(
        report.all_pass(),
        "failing checks: {:?}",
        report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
    );
    // 4 schemes x 3 modes of time series
    let count = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .ends_with("timeseries.csv")
        })
        .count();
    assert_eq!(count, 12);
}

#[test]
fn reproduce_fig8_passes_golden_checks() {
    let dir = tempfile::tempdir().unwrap();
    let report = reproduce(Target::Fig8, dir.path()).unwrap();
    assert!(
        report.all_pass(),
        "failing checks: {:?}",
        report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
    );
    assert!(dir.path().join("fig8_classical_errors.csv").exists());
    assert!(dir.path().join("fig8_rf_slopes.csv").exists());
}

#[test]
fn reproduce_fig9_passes_golden_checks() {
    let dir = tempfile::tempdir().unwrap();
    let report = reproduce(Target::Fig9, dir.path()).unwrap();
    assert!(
        report.all_pass(),
        "failing checks: {:?}",
        report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
    );
}

#[test]
fn reproduce_fig10_passes_golden_checks() {
    let dir = tempfile::tempdir().unwrap();
    let report = reproduce(Target::Fig10, dir.path()).unwrap();
    assert!(
        report.all_pass(),
        "failing checks: {:?}",
        report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
    );
    assert!(dir.path().join("fig10_idt_slopes.csv").exists());
}

#[test]
fn reproduce_fig2_5_passes_golden_checks() {
    let dir = tempfile::tempdir().unwrap();
    let report = reproduce(Target::Fig2to5, dir.path()).unwrap();
    assert!(
        report.all_pass(),
        "failing checks: {:?}",
        report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
    );
    assert!(dir
        .path()
        .join("advection-noise_RK44_rf_mu0.9_amplification.csv")
        .exists());
}

#[test]
fn committed_configs_resolve_and_run() {
    for name in [
        "oscillator_rf.cfg",
        "dissipative_r.cfg",
        "burgers_rf.cfg",
        "advection_smooth_classical.cfg",
    ] {
        let dir = tempfile::tempdir().unwrap();
        let overlay = parse_config_file(&repo_configs().join(name)).unwrap();
        let flags = ConfigOverlay {
            out: Some(dir.path().to_string_lossy().into_owned()),
            ..Default::default()
        };
        let config = flags.over(overlay).resolve().unwrap();
        let summary = run(&config).unwrap();
        assert!(summary.failure.is_none(), "{name}: {:?}", summary.failure);
        assert!(summary.steps > 0);
    }
}

#[test]
fn converge_handles_failed_cells() {
    // a mu... cfl far above stability: SSPRK22 relaxation stalls or drifts
    // off; the table keeps the cell empty and still fits the good schemes
    let spec = ConvergeSpec {
        experiment: rfrk_cli::config::ExperimentId::Oscillator,
        schemes: vec!["RK44".into()],
        mode: rfrk::Method::RelaxationFree,
        k_override: None,
        step_values: vec![0.2, 0.1, 0.05],
        t_end: 5.0,
    };
    let table = convergence_table(&spec).unwrap();
    assert_eq!(table.rows.len(), 3);
    let slope = table.slopes[0].slope.unwrap();
    assert!(slope > 3.5, "slope {slope}");
}

#[test]
fn binary_list_schemes() {
    let out = bin().arg("list-schemes").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["SSPRK22", "SSPRK33", "RK44", "BSRK85"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn binary_run_with_config_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "run",
            "--config",
            repo_configs().join("oscillator_rf.cfg").to_str().unwrap(),
            "--t-end",
            "5",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("steps=50"), "{text}");
    assert!(dir
        .path()
        .join("oscillator_RK44_rf_dt0.1_timeseries.csv")
        .exists());
}

#[test]
fn binary_exit_codes() {
    // config error: unknown experiment
    let out = bin()
        .args(["run", "--experiment", "pendulum", "--dt", "0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // config error: wrong step kind for the experiment
    let out = bin()
        .args(["run", "--experiment", "burgers", "--dt", "0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // integration failure: rf far beyond the stability limit
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "run",
            "--experiment",
            "advection-noise",
            "--mode",
            "rf",
            "--mu",
            "3.0",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_converge_burgers_idt() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "converge",
            "--experiment",
            "burgers",
            "--scheme",
            "RK44",
            "--mode",
            "idt",
            "--cfl",
            "0.3,0.15,0.075,0.0375",
            "--t-end",
            "0.2",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let slope_line = text.lines().find(|l| l.starts_with("RK44,idt")).unwrap();
    let slope: f64 = slope_line.split(',').nth(2).unwrap().parse().unwrap();
    assert!((slope - 3.0).abs() < 0.4, "idt slope {slope}");
}

#[test]
fn binary_reproduce_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "reproduce",
            "--target",
            "table1",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = std::fs::read_to_string(dir.path().join("table1_report.txt")).unwrap();
    assert!(report.contains("overall: PASS"));
}

#[test]
fn identical_reproduce_runs_are_byte_identical() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    reproduce(Target::Table1, d1.path()).unwrap();
    reproduce(Target::Table1, d2.path()).unwrap();
    let a = std::fs::read(d1.path().join("table1.csv")).unwrap();
    let b = std::fs::read(d2.path().join("table1.csv")).unwrap();
    assert_eq!(a, b);
}
