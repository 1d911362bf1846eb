use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dimer-expansion"));
    c.env_remove("DIMER_EXPANSION_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn result(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["manifest"]["version"], env!("CARGO_PKG_VERSION"));
    doc["result"].clone()
}

fn code(args: &[&str]) -> (i32, String) {
    let out = run(args);
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn decimal(v: &Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn matchings_on_small_tori() {
    let r = result(&["matchings", "--dims", "6"]);
    assert_eq!(r["matching_count"], "2");
    assert!((decimal(&r["lambda_N"]) - 2f64.ln() / 6.0).abs() < 1e-15);
    assert_eq!(
        result(&["matchings", "--dims", "4,4"])["matching_count"],
        "272"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["matchings", "--dims", "3,3"]).0, 2);
    assert_eq!(code(&["matchings", "--dims", "8,8"]).0, 3);
    assert_eq!(
        code(&["kernels", "--s", "3", "--d", "2", "--method", "direct", "--budget", "10"]).0,
        3
    );
    assert_eq!(code(&["beta", "--i", "6", "--N", "10"]).0, 2);
    assert_eq!(code(&["beta", "--j", "0.3", "--N", "10,12"]).0, 2);
    assert_eq!(code(&["kernels", "--s", "3", "--appendix"]).0, 2);
    assert_eq!(code(&["matchings", "--dims", "6", "--format", "csv"]).0, 2);
}

#[test]
fn appendix_limits() {
    let r = result(&["kernels", "--s", "2", "--d", "1", "--appendix"]);
    let want = [
        ("A", "-1/8"),
        ("B", "0/1"),
        ("C", "0/1"),
        ("D", "-1/4"),
        ("E", "-1/2"),
        ("F", "1/1"),
    ];
    for (k, v) in want {
        assert_eq!(r["limits"][k], v, "term {k}");
    }
    assert_eq!(r["Jbar_2"], "1/8");
    assert_eq!(r["sum_limit"], "1/8");
}

#[test]
fn kernel_polynomials() {
    let r3 = result(&["kernels", "--s", "3", "--all-d"]);
    assert_eq!(r3["d_poly"]["1"], "0/1");
    assert_eq!(r3["d_poly"]["2"], "1/12");
    let r4 = result(&["kernels", "--s", "4", "--all-d"]);
    assert_eq!(r4["d_poly"]["2"], "-3/32");
    assert_eq!(r4["d_poly"]["3"], "3/64");
    assert_eq!(r4["holdout_d"], serde_json::json!([4]));
}

#[test]
fn series_coefficients_and_order_bookkeeping() {
    let r = result(&["series", "--K", "2"]);
    assert_eq!(r["c"]["1"], "1/8");
    assert_eq!(r["c"]["2"], "5/96");
    assert_eq!(r["leading"], "0.5*ln(2d)-0.5");
    let (c, err) = code(&["series", "--K", "3"]);
    assert_eq!(c, 2);
    assert!(err.contains("requires Jbar_5, Jbar_6"), "{err}");
}

#[test]
fn series_evaluation() {
    let r = result(&["series", "--K", "2", "--eval-d", "3"]);
    let expected = 0.5 * 6f64.ln() - 0.5 + 1.0 / 24.0 + 5.0 / 864.0;
    assert!((decimal(&r["eval"]["value"]) - expected).abs() < 1e-14);
    let near = result(&["series", "--K", "2", "--eval-d", "2", "--oracle", "4x4,6x6"]);
    let v = decimal(&near["eval"]["value"]);
    assert!(v > 0.25 && v < 0.30);
    assert_eq!(near["finite_volume"].as_array().unwrap().len(), 2);
}

#[test]
fn beta_tables() {
    for row in result(&["beta", "--j", "0", "--N", "10,20"])["rows"]
        .as_array()
        .unwrap()
    {
        assert_eq!(row["beta_exact"], "1/1");
    }
    let rows = result(&["beta", "--j", "1/4", "--N", "100,200,400"])["rows"].clone();
    let gaps: Vec<f64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| decimal(&r["rate_gap"]))
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    let fixed = result(&["beta", "--i", "2", "--N", "20,200"])["rows"].clone();
    let b: Vec<f64> = fixed
        .as_array()
        .unwrap()
        .iter()
        .map(|r| decimal(&r["beta"]) - 1.0)
        .collect();
    assert!(b[1].abs() < b[0].abs());
}

#[test]
fn output_is_deterministic() {
    let args = ["kernels", "--s", "2", "--d", "2"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn csv_per_n_table() {
    let out = run(&["kernels", "--s", "2", "--d", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("N,p,q"));
    // Jbar_2 = 1/8 - 1/(4(N-1)) on cycles.
    assert_eq!(lines.next(), Some("6,3,40"));
}

fn write_kernels(dir: &Path, s: &str) -> String {
    let path = dir.join(format!("k{s}.json"));
    let out = run(&[
        "kernels",
        "--s",
        s,
        "--all-d",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    path.to_str().unwrap().to_string()
}

#[test]
fn series_from_kernel_files() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<String> = ["2", "3", "4"]
        .iter()
        .map(|s| write_kernels(dir.path(), s))
        .collect();
    let r = result(&["series", "--K", "2", "--kernels", &files.join(",")]);
    assert_eq!(r["c"]["2"], "5/96");
    let (c, err) = code(&["series", "--K", "2", "--kernels", &files[..2].join(",")]);
    assert_eq!(c, 2);
    assert!(err.contains("Jbar_4"), "{err}");
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["matchings", "--dims", "2,2"])
        .env("DIMER_EXPANSION_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("matchings.json")).unwrap())
            .unwrap();
    assert_eq!(doc["result"]["matching_count"], "8");
}
