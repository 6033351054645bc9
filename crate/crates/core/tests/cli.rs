use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn nftsoliton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nftsoliton"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &Path, json: &str) -> PathBuf {
    let path = dir.join("spec.json");
    fs::write(&path, json).unwrap();
    path
}

fn run(dir: &TempDir, cmd: &str, spec: &str, extra: &[&str]) -> (Output, PathBuf) {
    let spec = write_spec(dir.path(), spec);
    let out = dir.path().join(cmd);
    let mut args = vec![
        cmd,
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    (nftsoliton(&args), out)
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const ONE_SOLITON: &str = r#"{"lambdas": [[0, 20]], "delta": 0.01, "D": 256, "omega_c": 10}"#;
const RADIATION: &str = r#"{"lambdas": [], "delta": 0.01, "D": 128, "omega_c": 10}"#;

#[test]
fn synthesize_writes_signal_and_report() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run(&dir, "synthesize", ONE_SOLITON, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&out);
    assert_eq!(r["schema_version"], "1.0");
    assert_eq!(r["command"], "synthesize");
    assert!(r["pair"]["unimodularity_residual"].as_f64().unwrap() <= 1e-6);
    let csv = fs::read_to_string(out.join("signal.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,t,re_Q,im_Q"));
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(first[0], 1.0);
    // samples sit at the midpoints of [-1, 0] with spacing 1/D
    assert!((first[1] - (-1.0 + 0.5 / 256.0)).abs() < 1e-12);
    assert_eq!(csv.lines().count(), 257);
    assert!(out.join("pair.csv").exists());
}

#[test]
fn delta_out_of_range_fails() {
    let dir = TempDir::new().unwrap();
    let (o, _) = run(
        &dir,
        "synthesize",
        r#"{"lambdas": [], "delta": 1.5, "D": 64, "omega_c": 10}"#,
        &[],
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("delta out of range"), "{}", stderr(&o));
}

#[test]
fn non_power_of_two_fails() {
    let dir = TempDir::new().unwrap();
    let (o, _) = run(
        &dir,
        "synthesize",
        r#"{"lambdas": [], "delta": 0.01, "D": 500, "omega_c": 10}"#,
        &[],
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("500"), "{}", stderr(&o));
}

#[test]
fn unknown_spec_field_fails() {
    let dir = TempDir::new().unwrap();
    let (o, _) = run(
        &dir,
        "synthesize",
        r#"{"lambdas": [], "delta": 0.01, "D": 64, "omega_c": 10, "x": 1}"#,
        &[],
    );
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn invert_and_forward_accept_inputs() {
    let dir = TempDir::new().unwrap();
    let (o, syn) = run(&dir, "synthesize", ONE_SOLITON, &[]);
    assert!(o.status.success(), "{}", stderr(&o));

    let pair = syn.join("pair.csv");
    let (o, inv) = run(
        &dir,
        "invert",
        ONE_SOLITON,
        &["--input", pair.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(inv.join("signal.csv")).unwrap(),
        fs::read_to_string(syn.join("signal.csv")).unwrap()
    );

    let signal = syn.join("signal.csv");
    let (o, fwd) = run(
        &dir,
        "forward",
        ONE_SOLITON,
        &["--input", signal.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&fwd);
    let eig = r["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 1);
    let lambda = &eig[0]["lambda"];
    assert!(lambda[0].as_f64().unwrap().abs() < 1e-4);
    assert!((lambda[1].as_f64().unwrap() - 20.0).abs() < 1e-4);
    let head = fs::read_to_string(fwd.join("reflection.csv")).unwrap();
    assert!(head.starts_with("omega,"));
}

#[test]
fn forward_rejects_malformed_csv() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a,b\n1,2\n").unwrap();
    let (o, _) = run(
        &dir,
        "forward",
        RADIATION,
        &["--input", bad.to_str().unwrap()],
    );
    assert!(!o.status.success());
}

#[test]
fn roundtrip_radiation_has_no_eigenvalues() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run(&dir, "roundtrip", RADIATION, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&out);
    assert_eq!(r["schema_version"], "1.0");
    assert!(r["eigenvalues"]["recovered"].as_array().unwrap().is_empty());
    assert!(r["fast_vs_sequential_max_rel"].as_f64().unwrap() <= 1e-8);
    assert!(r["reflection"]["passband_max_rel"].is_number());
}

#[test]
fn asymptotics_reports_predictions() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run(&dir, "asymptotics", ONE_SOLITON, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&out);
    let r0 = r["reflection_at_zero"].as_f64().unwrap();
    assert!((r0 - 1.115e-4).abs() < 2e-6, "{r0}");
    assert_eq!(r["norming"].as_array().unwrap().len(), 1);
    assert!(out.join("asymptotics.csv").exists());
}

#[test]
fn small_bench_runs() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"lambdas": [[0, 20]], "delta": 0.01, "D": 64, "omega_c": 10,
                   "bench_sizes": [64, 128], "bench_repeats": 1}"#;
    let (o, out) = run(&dir, "bench", spec, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&out);
    assert_eq!(r["rows"].as_array().unwrap().len(), 2);
    assert!(r["fast_per_sample_ratio"].as_f64().unwrap() > 0.0);
    let csv = fs::read_to_string(out.join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
