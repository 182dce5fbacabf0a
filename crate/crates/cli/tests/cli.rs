//! End-to-end tests of the `tdtunnel` binary: exit codes, file formats,
//! determinism and the documented defaults.

use std::path::Path;
use std::process::{Command, Output};

const WORKED: &str = "\
# worked case: chi = 1, L = 1, V0 = 0.1
particle.mass = 1.0
particle.energy = 0.5
barrier.u0 = 1.0
barrier.length = 1.0
";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdtunnel"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary should run")
}

fn write(dir: &Path, name: &str, contents: &str) {
    std::fs::write(dir.join(name), contents).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Pulls `"key": value` out of the flat JSON records the CLI writes.
fn json_value(record: &str, key: &str) -> String {
    let marker = format!("\"{key}\": ");
    let start = record.find(&marker).unwrap_or_else(|| panic!("no {key}")) + marker.len();
    record[start..]
        .split(|c| c == ',' || c == '\n')
        .next()
        .unwrap()
        .trim()
        .to_string()
}

#[test]
fn times_record_on_worked_case() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "w.conf", WORKED);
    let out = run(dir.path(), &["times", "--config", "w.conf", "--out", "t"]);
    assert!(out.status.success(), "{out:?}");
    let record = read(dir.path(), "t.times.json");
    let tau_exact: f64 = json_value(&record, "tau_exact").parse().unwrap();
    let tau_simplified: f64 = json_value(&record, "tau_simplified").parse().unwrap();
    let tau_bound: f64 = json_value(&record, "tau_bound").parse().unwrap();
    assert!((tau_exact - 0.50035930903882032228).abs() <= 1e-6);
    assert_eq!(tau_simplified, 0.5);
    // default e_meas = E - V0 = 0.4, so the bound is 1/(2 * 0.1) = 5
    assert!((tau_bound - 5.0).abs() <= 1e-12);
}

#[test]
fn model_record_derives_worked_coupling() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "w.conf", WORKED);
    let out = run(dir.path(), &["model", "--config", "w.conf", "--out", "m"]);
    assert!(out.status.success());
    let record = read(dir.path(), "m.model.json");
    let omega0: f64 = json_value(&record, "omega0").parse().unwrap();
    assert!((omega0 - 0.26239980406561380232).abs() <= 1e-6 * 0.2624);
}

#[test]
fn model_with_zero_perturbation_has_zero_omega0() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "w.conf",
        &format!("{WORKED}perturbation.v0 = 0.0\n"),
    );
    let out = run(dir.path(), &["model", "--config", "w.conf", "--out", "m"]);
    assert!(out.status.success());
    let record = read(dir.path(), "m.model.json");
    let omega0: f64 = json_value(&record, "omega0").parse().unwrap();
    assert_eq!(omega0, 0.0);
    // and the stop time is then absent
    let out = run(dir.path(), &["times", "--config", "w.conf", "--out", "t"]);
    assert!(out.status.success());
    let record = read(dir.path(), "t.times.json");
    assert_eq!(json_value(&record, "tau_exact"), "null");
}

#[test]
fn density_minimal_grid_is_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "w.conf",
        &format!("{WORKED}grid.nt = 2\ngrid.nx = 2\n"),
    );
    let out = run(dir.path(), &["density", "--config", "w.conf", "--out", "d"]);
    assert!(out.status.success());
    let table = read(dir.path(), "d.density.csv");
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "t,x,rho");
    assert_eq!(lines.len(), 5, "header + 4 rows: {table}");
    let envelope = read(dir.path(), "d.envelope.csv");
    assert!(envelope.starts_with("x,rho_min,rho_max\n"));
}

#[test]
fn hartman_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "w.conf", WORKED);
    let out = run(dir.path(), &["hartman-scan", "--config", "w.conf", "--out", "h"]);
    assert!(out.status.success());
    let table = read(dir.path(), "h.hartman.csv");
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "L,tau_exact,tau_simplified");
    assert_eq!(lines.len(), 6); // default scan has five lengths
    // tau_simplified column identical on every row
    let last: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert!(last.iter().all(|&v| v == last[0]));
}

#[test]
fn unknown_key_fails_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.conf", &format!("{WORKED}barier.u0 = 1.0\n"));
    let out = run(dir.path(), &["model", "--config", "bad.conf"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("barier.u0"), "{stderr}");
    assert!(stderr.contains("line 6"), "{stderr}");
}

#[test]
fn malformed_line_fails_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.conf", "particle.mass\n");
    let out = run(dir.path(), &["model", "--config", "bad.conf"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validation_error_names_field_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    // energy above the barrier: no evanescent regime
    write(
        dir.path(),
        "bad.conf",
        "particle.mass = 1.0\nparticle.energy = 2.0\nbarrier.u0 = 1.0\nbarrier.length = 1.0\n",
    );
    let out = run(dir.path(), &["times", "--config", "bad.conf"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("barrier.u0"));
}

#[test]
fn premature_measurement_fails_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // packet starts on top of the barrier and has no time to clear it
    write(
        dir.path(),
        "w.conf",
        &format!("{WORKED}oracle.x0 = -5.0\noracle.steps = 10\ngrid.nx = 5\n"),
    );
    let out = run(dir.path(), &["compare", "--config", "w.conf", "--out", "c"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_diagnostics_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "w.conf",
        &format!("{WORKED}oracle.steps = 100\noracle.snapshot_every = 50\n"),
    );
    let out = run(dir.path(), &["oracle", "--config", "w.conf", "--out", "o"]);
    assert!(out.status.success(), "{out:?}");
    let record = read(dir.path(), "o.oracle.json");
    let norm: f64 = json_value(&record, "final_norm").parse().unwrap();
    assert!((norm - 1.0).abs() <= 1e-8);
    let snaps = read(dir.path(), "o.snapshots.csv");
    let lines: Vec<&str> = snaps.lines().collect();
    assert_eq!(lines[0], "step,x,abs_psi_sq");
    // snapshots at steps 0, 50, 100 over the default 2501-point grid
    assert_eq!(lines.len(), 1 + 3 * 2501);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "w.conf", WORKED);
    for cmd in ["density", "times", "hartman-scan"] {
        let a = run(dir.path(), &[cmd, "--config", "w.conf", "--out", "a"]);
        let b = run(dir.path(), &[cmd, "--config", "w.conf", "--out", "b"]);
        assert!(a.status.success() && b.status.success());
        for entry in std::fs::read_dir(dir.path()).unwrap() {
            let name = entry.unwrap().file_name().into_string().unwrap();
            if let Some(rest) = name.strip_prefix("a.") {
                if rest.ends_with("meta.txt") {
                    continue; // sidecar carries run info by design
                }
                assert_eq!(
                    read(dir.path(), &name),
                    read(dir.path(), &format!("b.{rest}")),
                    "{name} differs between runs"
                );
            }
        }
    }
}

#[test]
fn sidecar_records_run_info() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "w.conf", WORKED);
    let out = run(
        dir.path(),
        &["times", "--config", "w.conf", "--out", "t", "--seed", "7"],
    );
    assert!(out.status.success());
    let meta = read(dir.path(), "t.meta.txt");
    assert!(meta.contains("command = times"));
    assert!(meta.contains("seed = 7"));
    assert!(meta.contains("unix_timestamp = "));
    // the resolved config in the sidecar re-parses to the same scenario
    assert!(meta.contains("particle.mass"));
}
