use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;
use tauquant::discretize::{Grid, GridFunction};
use tauquant::quantize::OperatorMatrix;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tauquant")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn identity_symbol_gives_identity_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["quantize", "--symbol", "1", "--tau", "weyl", "--grid", "1,64,pi", "--out", "A.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let a = OperatorMatrix::read(&dir.path().join("A.csv")).unwrap();
    assert_eq!(a.size(), 64);
    let id = OperatorMatrix::identity(a.grid.clone());
    assert!(a.max_diff(&id) <= 1e-12);
}

#[test]
fn heisenberg_midpoint_prints_exact_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["heisenberg", "midpoint", "--group", "standard", "--point", "1,2,5", "--point2", "-1,-2,-5"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0, 0, -4/3");
}

#[test]
fn heisenberg_tau_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    for group in ["standard", "polarised"] {
        let a = run(&["heisenberg", "tau", "--group", group, "--point", "3/2,-2,7", "--method", "closed"], dir.path());
        let b = run(&["heisenberg", "tau", "--group", group, "--point", "3/2,-2,7", "--method", "integral"], dir.path());
        assert!(a.status.success() && b.status.success());
        assert_eq!(stdout(&a), stdout(&b));
    }
    let s = run(&["heisenberg", "symcheck", "--point", "1/3,5,-2"], dir.path());
    assert_eq!(stdout(&s).trim(), "true");
}

#[test]
fn convert_report_has_small_defect() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["convert", "--symbol", "x*k", "--from", "kn", "--to", "akn", "--order", "2", "--grid", "1,64,pi", "--report", "r.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json_file(&dir.path().join("r.json"));
    assert!(r["defect"].as_f64().unwrap() <= 1e-8, "{}", r["defect"]);
    assert_eq!(r["M"], 2);
    assert!(r["terms"].as_array().unwrap().len() >= 2);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"command": "quantize", "symbol": "1", "tau": "kn", "grid": "1,16,pi", "out": "from_config.csv"}"#;
    std::fs::write(dir.path().join("job.json"), cfg).unwrap();
    let o = run(&["quantize", "--config", "job.json", "--grid", "1,8,pi"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let a = OperatorMatrix::read(&dir.path().join("from_config.csv")).unwrap();
    assert_eq!(a.size(), 8);

    let wrong = run(&["norm", "--config", "job.json"], dir.path());
    assert_eq!(wrong.status.code(), Some(2));
    assert!(stderr(&wrong).starts_with("E_USAGE"));
}

#[test]
fn validation_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["quantize", "--symbol", "1 +", "--tau", "weyl", "--grid", "1,16,pi", "--out", "B.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("E_SYNTAX"), "{err}");
    assert!(!dir.path().join("B.csv").exists());

    let o = run(&["quantize", "--symbol", "1", "--tau", "nope(", "--grid", "1,16,pi", "--out", "B.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["quantize", "--symbol", "1", "--tau", "weyl", "--grid", "1,16", "--out", "B.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("E_GRID"));
    let o = run(&["apply", "--matrix", "missing.csv", "--in", "u.csv", "--out", "v.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("v.csv").exists());
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec!["quantize", "--symbol", "(1 + 0.3*sin(x))*k*exp(-((k/6)^2))", "--tau", "w/2 + 0.1*sin(w)", "--grid", "1,32,pi", "--out", out]
    };
    assert!(run(&args("a.csv"), dir.path()).status.success());
    assert!(run(&args("b.csv"), dir.path()).status.success());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);

    let norm = || stdout(&run(&["norm", "--matrix", "a.csv", "--method", "power"], dir.path()));
    assert_eq!(norm(), norm());
}

#[test]
fn apply_derivative_to_fourier_mode() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(1, 32, std::f64::consts::PI).unwrap();
    let u = GridFunction::from_fn(g, |x| Complex64::new(0.0, x[0]).exp());
    u.write(&dir.path().join("u.csv")).unwrap();
    let o = run(
        &["apply", "--symbol", "k", "--tau", "kn", "--grid", "1,32,pi", "--in", "u.csv", "--out", "v.csv"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v = GridFunction::read(&dir.path().join("v.csv")).unwrap();
    assert!(v.max_abs_diff(&u) <= 1e-12);
}

#[test]
fn adjoint_and_norm_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["adjoint", "--symbol", "sin(x)*exp(-((k/5)^2))", "--symbol-im", "cos(x)*k*exp(-((k/5)^2))", "--tau", "linear:0.3", "--grid", "1,64,pi"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["defect"].as_f64().unwrap() <= 1e-10);

    let a = run(&["norm", "--symbol", "2", "--tau", "kn", "--grid", "1,16,pi", "--method", "svd"], dir.path());
    let r: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!((r["norm"].as_f64().unwrap() - 2.0).abs() <= 1e-12);
}

#[test]
fn parametrix_and_garding_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["parametrix", "--symbol", "1 + k^2", "--tau", "kn", "--m", "2", "--order", "2", "--r0", "2", "--grid", "1,64,pi"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["residual"].as_f64().unwrap() <= 1e-8);

    let o = run(&["garding", "--symbol", "(2 + sin(x))*(1 + k^2)", "--tau", "weyl", "--m", "1", "--grid", "1,32,2pi"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["verified"], true);
}

#[test]
fn non_elliptic_symbol_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["parametrix", "--symbol", "sin(x)*k^2", "--tau", "kn", "--m", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("E_NOT_ELLIPTIC"), "{}", stderr(&o));
}

#[test]
fn symbolic_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reduce-amplitude", "--amplitude", "exp(-(k^2))", "--n-red", "1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["amplitude"]["re"].as_str().unwrap().contains("w1"));

    let o = run(&["check-tau", "--tau", "w/2 + 0.1*sin(w)", "--samples", "200"], dir.path());
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["hadamard_ok"], true);

    let o = run(&["cv-bound", "--amplitude", "cos(x - y)/(1 + k^2)", "--samples", "64"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["m_val"].as_f64().unwrap() >= 1.0);

    let o = run(&["changevar", "--symbol", "cos(x)*k^2", "--tau", "weyl", "--grid", "1,32,pi"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["b0"]["re"].as_str().unwrap().contains("k1"));
}
