use std::process::{Command, Output};

fn bohrlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bohrlab"))
        .args(args)
        .env("BOHRLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_json() {
    let o = bohrlab(&["solve", "--family", "omega_gamma", "--gamma", "0", "--k", "1", "--p", "2", "--tol", "1e-12", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["family"]["family"], "omega_gamma");
    let root = v["root"].as_f64().unwrap();
    assert!((root - (2f64.sqrt() - 1.0)).abs() < 1e-11);
    assert_eq!(v["radius"].as_f64().unwrap(), 1.0 / 3.0);
    let b = v["bracket"].as_array().unwrap();
    assert!(b[1].as_f64().unwrap() - b[0].as_f64().unwrap() <= 1e-12);
}

#[test]
fn solve_text_and_no_root() {
    let o = bohrlab(&["solve", "--family", "general_sc", "--lambda", "1", "--k", "0", "--p", "3", "--tol", "1e-12"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("root    none"));
    assert!(text.contains("binding cap"));

    let o = bohrlab(&["solve", "--family", "starlike", "--p", "inf", "--tol", "1e-12", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = v["root"].as_f64().unwrap();
    assert!((r - 0.3175).abs() < 5e-4, "{r}");
}

#[test]
fn solve_rejects_bad_parameters() {
    let o = bohrlab(&["solve", "--family", "omega_gamma", "--gamma", "1.5", "--tol", "1e-12"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bohrlab(&["solve", "--family", "annulus", "--tol", "1e-12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sub.json");
    let o = bohrlab(&[
        "verify", "subordination", "--trials", "20", "--dim", "2", "--degree", "32", "--seed", "42", "--tol", "1e-8",
        "--out", out.to_str().unwrap(), "--format", "json",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("20 passed, 0 failed"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["suite"], "subordination");
    assert_eq!(v["pass_count"], 20);
    assert_eq!(v["trials"].as_array().unwrap().len(), 20);
}

#[test]
fn verify_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_bohrlab"))
            .args(["verify", "polyanalytic", "--family", "convex_sub", "--beta", "0.5", "--k", "0.5", "--p", "3"])
            .args(["--trials", "8", "--dim", "2", "--degree", "32", "--seed", "3", "--tol", "1e-8"])
            .args(["--out", out.to_str().unwrap(), "--format", "csv"])
            .env("BOHRLAB_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        std::fs::read_to_string(out).unwrap()
    };
    assert_eq!(run("1", "a.csv"), run("3", "b.csv"));
}

#[test]
fn verify_failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("explore.csv");
    let o = bohrlab(&[
        "verify", "schwarz", "--trials", "30", "--degree", "32", "--seed", "1", "--tol", "1e-8", "--r-grid", "0.3,0.95",
        "--explore", "--out", out.to_str().unwrap(), "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("instance"));
    assert!(dir.path().join("explore.csv.failures").is_dir());
}

#[test]
fn verify_rejects_out_of_range_grid() {
    let o = bohrlab(&["verify", "von-neumann", "--trials", "2", "--r-grid", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bohrlab(&["verify", "polyanalytic", "--family", "half_plane", "--trials", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_thread_variable_is_an_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_bohrlab"))
        .args(["verify", "schwarz", "--trials", "2"])
        .env("BOHRLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sharpness_scan() {
    let o = bohrlab(&["scan", "sharpness", "--a", "0.99", "--rmin", "0.3", "--rmax", "0.34", "--steps", "41"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("r,lo,hi,exceeds"));
    assert!(text.contains("match"));
    assert!(text.lines().any(|l| l.ends_with(",true")));

    // The range does not reach the threshold 1/2 for a = 1/2.
    let o = bohrlab(&["scan", "sharpness", "--a", "0.5", "--rmin", "0.1", "--rmax", "0.4", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn radius_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("radii.csv");
    let o = bohrlab(&["table", "--families", "omega_gamma,half_plane", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("family,lambda,gamma,beta,k,p,root"));
    // 3 γ × 3 k × 8 orders + 3 k × 8 orders
    assert_eq!(text.lines().count(), 1 + 72 + 24);
    let row = text
        .lines()
        .find(|l| l.starts_with("omega_gamma,,0,,1,2,"))
        .expect("γ = 0, k = 1, p = 2 row");
    assert!(row.starts_with("omega_gamma,,0,,1,2,0.41421356"));
    assert!(row.ends_with(",cap"));

    let out = dir.path().join("radii.json");
    let o = bohrlab(&["table", "--families", "general_sc", "--k", "0", "--p", "2", "--lambda", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v[0]["root"], serde_json::Value::Null);
    assert_eq!(v[0]["radius"], v[0]["cap"]);
}
