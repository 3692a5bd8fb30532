//! Black-box tests of the `imcf` binary: exit codes, artifact layout, file
//! formats, and determinism of the command-line surface.

use std::path::Path;
use std::process::{Command, Output};

use imcf_core::output::read_numeric_csv;

fn imcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imcf"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

#[test]
fn unknown_config_key_exits_4_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "cells = 64\nwibble = 3\n").unwrap();
    let out = imcf(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    let msg = stderr(&out);
    assert!(msg.contains("line 2"), "{msg}");
    assert!(msg.contains("wibble"), "{msg}");
}

#[test]
fn invalid_flag_values_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().join("out");
    for args in [
        vec!["run", "--cfl-gamma", "0", "--out-dir", od.to_str().unwrap()],
        vec![
            "run",
            "--mode",
            "hexagon",
            "--out-dir",
            od.to_str().unwrap(),
        ],
        vec![
            "run",
            "--u0",
            "pyramid:2",
            "--out-dir",
            od.to_str().unwrap(),
        ],
    ] {
        let out = imcf(&args);
        assert_eq!(code(&out), 4, "args {args:?}: {}", stderr(&out));
    }
}

#[test]
fn non_spacelike_initial_data_exits_4_before_stepping() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().join("out");
    let out = imcf(&[
        "run",
        "--cells",
        "64",
        "--u0",
        "bump:1.0,0.9",
        "--out-dir",
        od.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(
        stderr(&out).contains("initial data rejected"),
        "{}",
        stderr(&out)
    );
    // Startup rejection: no trajectory is produced.
    assert!(!od.join("trajectory.csv").exists());
}

#[test]
fn oversized_fixed_step_exits_3_and_keeps_partial_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().join("out");
    let out = imcf(&[
        "run",
        "--cells",
        "32",
        "--dt",
        "10",
        "--out-dir",
        od.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("guard"), "{}", stderr(&out));
    assert!(
        stderr(&out).contains("partial trajectory"),
        "{}",
        stderr(&out)
    );
    let (header, rows) = read_numeric_csv(&od.join("trajectory.csv")).unwrap();
    assert!(header.starts_with("t,min_u"));
    assert_eq!(rows.len(), 1); // only the initial record survives
    assert_eq!(rows[0][0], 0.0);
}

#[test]
fn run_artifacts_row_count_and_determinism() {
    // 2000 fixed steps, a record every 100 steps: 1 + 2000/100 = 21 rows;
    // the first row sits at t = 0 with the initial cap area; repeated runs
    // are byte-identical.
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> std::path::PathBuf {
        let od = dir.path().join(name);
        let out = imcf(&[
            "run",
            "--cells",
            "64",
            "--u0",
            "bump:1.5,0.05",
            "--dt",
            "1e-4",
            "--t-end",
            "0.2",
            "--csv-every",
            "100",
            "--out-dir",
            od.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        od
    };
    let a = run("a");
    let b = run("b");

    for f in [
        "trajectory.csv",
        "config.resolved",
        "snapshot_final.csv",
        "report.txt",
    ] {
        assert!(a.join(f).exists(), "{f} missing");
    }

    let (_, rows) = read_numeric_csv(&a.join("trajectory.csv")).unwrap();
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[0][0], 0.0);
    // Column 10 is the total area; at t = 0 it must equal the area of the
    // initial graph over the cap: u0 ~ 1.5 bump, |cap| = 2π(cosh 1 − 1)·u²v…
    // checked loosely against the round value 1.5²·2π(cosh 1 − 1).
    let cap = std::f64::consts::TAU * (1.0f64.cosh() - 1.0);
    assert!(
        (rows[0][10] / (2.25 * cap) - 1.0).abs() < 0.2,
        "initial area {} vs round scale {}",
        rows[0][10],
        2.25 * cap
    );

    let bytes_a = std::fs::read(a.join("trajectory.csv")).unwrap();
    let bytes_b = std::fs::read(b.join("trajectory.csv")).unwrap();
    assert_eq!(
        bytes_a, bytes_b,
        "trajectories differ between identical runs"
    );
    // config.resolved agrees apart from the out_dir line itself.
    let sans_dir = |p: &Path| -> String {
        std::fs::read_to_string(p.join("config.resolved"))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("out_dir"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(sans_dir(&a), sans_dir(&b));

    let report = std::fs::read_to_string(a.join("report.txt")).unwrap();
    assert!(report.contains("result: PASS"), "{report}");
}

#[test]
fn dedicated_flags_then_set_pairs_override_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().join("out");
    let cfg = dir.path().join("base.cfg");
    std::fs::write(&cfg, "cells = 128\ncfl_gamma = 0.1\n").unwrap();
    let out = imcf(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--cells",
        "48",
        "--set",
        "cells=32",
        "--dt",
        "1e-3",
        "--t-end",
        "0.01",
        "--out-dir",
        od.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let resolved = std::fs::read_to_string(od.join("config.resolved")).unwrap();
    assert!(resolved.contains("cells = 32"), "{resolved}");
    assert!(resolved.contains("cfl_gamma = 0.1"), "{resolved}");
}

#[test]
fn verify_fresh_runs_both_gauges_and_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().join("out");
    let out = imcf(&[
        "verify",
        "--cells",
        "64",
        "--u0",
        "bump:1.5,0.05",
        "--t-end",
        "0.5",
        "--t-end-rescaled",
        "12",
        "--out-dir",
        od.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}\n{}", stdout(&out), stderr(&out));
    assert!(
        stdout(&out).contains("verify: all checks passed"),
        "{}",
        stdout(&out)
    );
    for f in [
        "trajectory_raw.csv",
        "trajectory_rescaled.csv",
        "report.txt",
    ] {
        assert!(od.join(f).exists(), "{f} missing");
    }
    let report = std::fs::read_to_string(od.join("report.txt")).unwrap();
    assert!(report.contains("raw leg"), "{report}");
    assert!(report.contains("rescaled leg"), "{report}");
}

#[test]
fn verify_stored_corrupted_trajectory_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().join("out");
    let out = imcf(&[
        "run",
        "--cells",
        "64",
        "--u0",
        "bump:1.5,0.05",
        "--dt",
        "1e-4",
        "--t-end",
        "0.2",
        "--out-dir",
        od.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    // Scale the area column of a middle row: the area law must now fail.
    let traj = od.join("trajectory.csv");
    let text = std::fs::read_to_string(&traj).unwrap();
    let corrupted: String = text
        .lines()
        .enumerate()
        .map(|(i, line)| {
            if i == 10 {
                let mut cols: Vec<String> = line.split(',').map(str::to_owned).collect();
                let area: f64 = cols[10].parse().unwrap();
                cols[10] = format!("{:.16e}", area * 1.2);
                cols.join(",") + "\n"
            } else {
                line.to_owned() + "\n"
            }
        })
        .collect();
    std::fs::write(&traj, corrupted).unwrap();

    let out = imcf(&[
        "verify",
        "--cells",
        "64",
        "--trajectory",
        traj.to_str().unwrap(),
        "--trajectory-mode",
        "raw",
    ]);
    assert_eq!(code(&out), 2, "{}\n{}", stdout(&out), stderr(&out));
    assert!(stdout(&out).contains("[FAIL] area-law"), "{}", stdout(&out));

    // A truncated file is an input error, not a monitor failure.
    std::fs::write(&traj, "t,min_u\n0,1\n").unwrap();
    let out = imcf(&["verify", "--trajectory", traj.to_str().unwrap()]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn oracle_compare_reports_tiny_error_and_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().join("out");
    let out = imcf(&[
        "oracle-compare",
        "--cells",
        "128",
        "--t-end",
        "0.5",
        "--out-dir",
        od.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}\n{}", stdout(&out), stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("max relative error"), "{text}");
    assert!(text.contains("oracle-compare: PASS"), "{text}");

    // Bump data has no closed-form reference: a config error, not a crash.
    let out = imcf(&["oracle-compare", "--u0", "bump:1.5,0.05"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn geometry_check_passes_and_prints_verdict_lines() {
    let out = imcf(&["geometry-check"]);
    assert_eq!(code(&out), 0, "{}\n{}", stdout(&out), stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("[PASS]"), "{text}");
    assert!(!text.contains("[FAIL]"), "{text}");
    assert!(text.contains("geometry-check: all"), "{text}");

    let out = imcf(&["geometry-check", "--n", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("n = 3"), "{}", stdout(&out));
}

#[test]
fn snapshot_reload_reproduces_trajectory_scalars() {
    // A snapshot written mid-run carries the full pointwise state: its u
    // column must reproduce the extrema recorded in the matching trajectory
    // row, and its node count must equal the grid's interior size.
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().join("out");
    let out = imcf(&[
        "run",
        "--cells",
        "64",
        "--u0",
        "bump:1.5,0.05",
        "--dt",
        "1e-4",
        "--t-end",
        "0.1",
        "--csv-every",
        "100",
        "--snapshot-every",
        "500",
        "--out-dir",
        od.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let (header, snap) = read_numeric_csv(&od.join("snapshot_00000500.csv")).unwrap();
    assert_eq!(header, "rho,u,v,H,grad_phi");
    assert_eq!(snap.len(), 64);

    let (_, rows) = read_numeric_csv(&od.join("trajectory.csv")).unwrap();
    let row = rows
        .iter()
        .find(|r| (r[0] - 0.05).abs() < 1e-12)
        .expect("record at t = 0.05");
    let min_u = snap.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
    let max_u = snap.iter().map(|r| r[1]).fold(f64::NEG_INFINITY, f64::max);
    assert!((min_u - row[1]).abs() < 1e-14, "{min_u} vs {}", row[1]);
    assert!((max_u - row[2]).abs() < 1e-14, "{max_u} vs {}", row[2]);

    // The snapshot's H column must reproduce the recorded curvature window
    // after multiplying by the gauge factor Θ(t) = e^{-t/n + c}, where c is
    // the midpoint of the initial log-radius range (recoverable from row 0).
    let c = 0.5 * (rows[0][1].ln() + rows[0][2].ln());
    let theta = (-row[0] / 2.0 + c).exp();
    let min_h = snap.iter().map(|r| r[3]).fold(f64::INFINITY, f64::min);
    let max_h = snap.iter().map(|r| r[3]).fold(f64::NEG_INFINITY, f64::max);
    assert!(
        (min_h * theta / row[8] - 1.0).abs() < 1e-12,
        "{} vs {}",
        min_h * theta,
        row[8]
    );
    assert!(
        (max_h * theta / row[9] - 1.0).abs() < 1e-12,
        "{} vs {}",
        max_h * theta,
        row[9]
    );
    for r in &snap {
        assert!(r[2] > 0.0 && r[2] <= 1.0 + 1e-12); // spacelike factor v
        assert!(r[3] > 0.0); // mean-convex
        assert!(r[4] < 1.0); // |D log u| strictly below the light cone
    }
}

#[test]
fn run_rescaled_converges_toward_constant_radius() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().join("out");
    let out = imcf(&[
        "run-rescaled",
        "--cells",
        "64",
        "--u0",
        "bump:1.5,0.05",
        "--t-end-rescaled",
        "12",
        "--out-dir",
        od.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}\n{}", stdout(&out), stderr(&out));
    let (_, rows) = read_numeric_csv(&od.join("trajectory.csv")).unwrap();
    let first = &rows[0];
    let last = rows.last().unwrap();
    // osc_rescaled_u (column 12) must have collapsed by orders of magnitude.
    assert!(
        last[12] < 1e-6 * first[12].max(1e-300),
        "osc {} -> {}",
        first[12],
        last[12]
    );
}

#[test]
fn missing_config_file_and_unwritable_out_dir_exit_4() {
    let out = imcf(&["run", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));

    let dir = tempfile::tempdir().unwrap();
    let file_not_dir = dir.path().join("occupied");
    std::fs::write(&file_not_dir, "x").unwrap();
    let od = file_not_dir.join("sub");
    let out = imcf(&[
        "run",
        "--cells",
        "32",
        "--dt",
        "1e-3",
        "--t-end",
        "0.01",
        "--out-dir",
        od.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}
