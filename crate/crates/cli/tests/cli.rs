use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const REFERENCE: &str =
    "mass_kg = 1e-27\nomega_emitter = 1e14\nomega_cavity = 1e14\nomega_trap = 1e9\nwavevector = 1e7\ncoupling_g = 1e8\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vibron-qed"))
        .args(args)
        .env("VIBRON_QED_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("params.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn field(line: &str, label: &str) -> f64 {
    line.trim_start()
        .strip_prefix(label)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn params_reports_reference_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), REFERENCE);
    let o = run(&["--config", &cfg, "params"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let get = |label: &str| field(text.lines().find(|l| l.trim_start().starts_with(label)).unwrap(), label);
    assert!((get("k*alpha") - 0.0726144550692).abs() < 1e-12);
    assert!((get("chi/g") - 0.05273).abs() < 1e-5);
    assert!((get("eta/g") - 0.72614).abs() < 1e-5);
    assert!((get("omega/g") - 10.0).abs() < 1e-12);
}

#[test]
fn missing_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &REFERENCE.replace("coupling_g = 1e8\n", ""));
    let o = run(&["--config", &cfg, "params"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("coupling_g"), "{}", stderr(&o));
}

#[test]
fn inconsistent_wavelength_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{REFERENCE}wavelength = 1e-6\n"));
    let o = run(&["--config", &cfg, "params"]);
    assert!(!o.status.success());
    assert!(!stderr(&o).is_empty());
}

#[test]
fn negative_trap_frequency_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &REFERENCE.replace("omega_trap = 1e9", "omega_trap = -1e9"));
    let o = run(&["--config", &cfg, "validate"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error:"), "{}", stderr(&o));
}

#[test]
fn gscan_writes_table_with_poles_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["gscan", "--emin", "999998", "--emax", "1000025", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("gscan_m0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("E,G_value,is_near_pole"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() > 100);
    assert!(rows.iter().all(|r| r.len() == 3));
    assert!(rows.iter().any(|r| r[2] == "true"));
}

#[test]
fn empty_window_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gscan", "--emin", "1000005", "--emax", "1000001", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectrum_passes_and_fails_on_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["spectrum", "--m", "1", "--out", out]);
    assert!(o.status.success(), "{}", stdout(&o));
    let roots = fs::read_to_string(dir.path().join("roots_m1.csv")).unwrap();
    assert_eq!(roots.lines().count(), 11);
    let first: f64 = roots.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((first - (2e6 - 1.41130947)).abs() < 1e-6, "{first}");

    let o = run(&["spectrum", "--nmax", "4", "--out", out]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn negative_sector_is_rejected() {
    let o = run(&["analytic", "--m", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("m must be >= 0"));
}

#[test]
fn coarse_time_step_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dynamics", "--dt", "1.0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("too coarse"), "{}", stderr(&o));
    assert!(!dir.path().join("timeseries_m0.csv").exists());
}

#[test]
fn validate_passes_and_reports_worst_offender_at_zero_tolerance() {
    let o = run(&["validate"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("validation passed"));

    let o = run(&["validate", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("worst: root"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        assert!(run(&["spectrum", "--out", out]).status.success());
        assert!(run(&["dynamics", "--tmax", "60", "--out", out]).status.success());
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert!(x == y, "{name:?} differs");
    }
}
