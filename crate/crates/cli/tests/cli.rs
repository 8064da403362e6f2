use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbar-lpt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn series_prints_harmonic_level() {
    let out = run(&["series", "--omega", "2", "--order", "3", "--format", "csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,correction,partial_sum");
    assert_eq!(lines[1], "1,3.000000,3.000000");
    assert_eq!(lines[3], "3,0.000000,3.000000");
}

#[test]
fn series_warns_when_terms_grow() {
    let out = run(&[
        "series",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--order",
        "20",
        "--backend",
        "rational",
    ]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("diverging"), "{}", stderr(&out));
}

#[test]
fn rational_full_precision_is_exact() {
    let out = run(&[
        "series",
        "--lambda",
        "1/10",
        "--order",
        "2",
        "--backend",
        "rational",
        "--full-precision",
    ]);
    assert!(stdout(&out).contains("3/8"), "{}", stdout(&out));
}

#[test]
fn config_file_and_flag_override() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"omega": 1, "coefficients": ["1/100", "1/100"], "state": {{"n": 1, "l": 1}}, "order": 4}}"#)
        .unwrap();
    let path = file.path().to_str().unwrap();
    let out = run(&["series", "--config", path, "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 4);
    assert_eq!(rows[0]["correction"], serde_json::json!(4.5));

    let out = run(&[
        "series", "--config", path, "-n", "0", "-l", "0", "--format", "json",
    ]);
    let rows: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["correction"], serde_json::json!(1.5));
}

#[test]
fn renorm_json_rows() {
    let out = run(&[
        "renorm", "--lambda", "0.01", "--mu", "0.01", "--order", "2,3", "--digits", "15",
        "--format", "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["order"], serde_json::json!(2));
    assert_eq!(rows[0]["partial_sum"], serde_json::json!(1.535791));
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(
        keys,
        [
            "order",
            "omega0",
            "partial_sum",
            "derivative",
            "curvature",
            "candidates"
        ]
    );
}

#[test]
fn numerov_level() {
    let out = run(&[
        "numerov", "--lambda", "0.01", "--mu", "0.01", "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out)
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("0,0,1.621690,"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    // configuration problems
    assert_eq!(code(&["series", "--omega", "0", "--mu", "1"]), Some(2));
    assert_eq!(code(&["series", "--mass", "-1"]), Some(2));
    assert_eq!(
        code(&["series", "--lambda", "0.1", "--digits", "8"]),
        Some(2)
    );
    assert_eq!(code(&["series", "--lambda", "abc"]), Some(2));
    assert_eq!(
        code(&["renorm", "--lambda", "1", "--backend", "rational"]),
        Some(2)
    );
    assert_eq!(
        code(&["series", "--config", "/nonexistent/config.json"]),
        Some(2)
    );
    assert_eq!(code(&["series", "--bogus"]), Some(2));
    // nothing bracketed
    assert_eq!(
        code(&["renorm", "--lambda", "0.01", "--order", "2", "--search", "3:5", "--digits", "15"]),
        Some(4)
    );
    assert_eq!(code(&["numerov", "--bracket", "4:5"]), Some(4));
}

#[test]
fn quick_verify_passes() {
    let out = run(&["verify", "--quick", "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rows
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["passed"] == Value::Bool(true)));
}

#[test]
fn low_order_table() {
    let out = run(&[
        "table1",
        "--max-order",
        "5",
        "--digits",
        "15",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "row,n,l,lambda,omega0,ours,paper,delta"
    );
    // two orders plus the numerical row for each of six columns
    assert_eq!(text.lines().count(), 1 + 6 * 3);
    assert!(text.contains("2,0,0,0.010000,1.046681,1.535791,1.535791,"));
}

#[test]
fn thread_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_hbar-lpt"))
        .args(["series", "--order", "2"])
        .env("HBAR_LPT_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_hbar-lpt"))
        .args(["series", "--order", "2"])
        .env("HBAR_LPT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
