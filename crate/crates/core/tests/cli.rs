use std::path::Path;
use std::process::{Command, Output};

fn nlmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlmem")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_config(dir.path(), "ok.cfg", "r = 3\n");
    let out = nlmem(&["validate", "--config", &ok]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("result=pass"));

    let bad = write_config(dir.path(), "bad.cfg", "a = 0.5\nb = 0.5\nc_plus = 0.4\nc_minus = 0\n");
    let out = nlmem(&["validate", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("rs_passes=false"));

    let malformed = write_config(dir.path(), "malformed.cfg", "r = 3\nsqueezing = 1\n");
    let out = nlmem(&["validate", "--config", &malformed]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("squeezing"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(nlmem(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nlmem(&["evolve", "--grid", "many"]).status.code(), Some(1));
    assert_eq!(nlmem(&["evolve", "--engine", "magic"]).status.code(), Some(1));
}

#[test]
fn physics_errors_exit_two() {
    assert_eq!(nlmem(&["evolve", "--alpha1", "-1", "--grid", "5"]).status.code(), Some(2));
    assert_eq!(nlmem(&["evolve", "--grid", "1"]).status.code(), Some(2));
}

#[test]
fn evolve_golden_rows() {
    let out = nlmem(&["evolve", "--r", "2", "--grid", "3", "--dt", "0.025"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("t,abs_kappa1,abs_kappa2,abs_kappa12,abs_lambda12,abs_kappa12_sq,abs_lambda12_sq,re_kappa1,im_kappa1"));
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "0.0000000000000000e+00");
    assert!(first[1..7].iter().all(|c| *c == "1.0000000000000000e+00"));
    let last: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(last[0], "5.9999999999999998e-02");
    assert!(!text.contains('\r'));
}

#[test]
fn evolve_is_deterministic_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = nlmem(&["evolve", "--r", "3", "--grid", "200", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn uncorrelated_kappa12_factorizes_rowwise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c0.cfg", "a = 1.2\nb = 0.9\nc_plus = 0\nc_minus = 0\ngrid_points = 100\n");
    let text = stdout(&nlmem(&["evolve", "--config", &cfg]));
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[3] - v[1] * v[2]).abs() < 1e-12);
    }
}

#[test]
fn quadrature_engine_agrees_with_closed_form() {
    let closed = stdout(&nlmem(&["evolve", "--r", "1.5", "--grid", "40"]));
    let quad = stdout(&nlmem(&["evolve", "--r", "1.5", "--grid", "40", "--engine", "quadrature"]));
    for (a, b) in closed.lines().zip(quad.lines()).skip(1) {
        for (x, y) in a.split(',').zip(b.split(',')) {
            let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
            assert!((x - y).abs() < 1e-6);
        }
    }
}

#[test]
fn measure_summary_block() {
    let out = nlmem(&["measure", "--r", "2", "--grid", "400"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for key in [
        "N_bell_I_squared=",
        "N_bell_II_squared=",
        "N_opt_squared=",
        "N_bell_I_linear=",
        "N_bell_II_linear=",
        "N_opt_linear=",
        "opt_converged_squared=",
    ] {
        assert!(text.contains(key), "missing {key} in\n{text}");
    }
    let value = |key: &str| -> f64 {
        text.lines().find_map(|l| l.strip_prefix(key)).unwrap().parse().unwrap()
    };
    assert!(value("N_opt_squared=") >= value("N_bell_II_squared=") - 1e-9);
    assert!(value("N_bell_I_squared=") < 1e-12);
}

#[test]
fn fig1_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlmem(&["fig1", "--out", dir.path().to_str().unwrap(), "--grid", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = std::fs::read_to_string(dir.path().join("fig1_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 6);
    assert_eq!(summary.lines().next().unwrap(), "r,N_squared,N_linear");
    let r5 = std::fs::read_to_string(dir.path().join("fig1_r5.csv")).unwrap();
    let first: Vec<&str> = r5.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[1], "1.0000000000000000e+00");
}
