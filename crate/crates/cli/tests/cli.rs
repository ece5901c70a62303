use std::process::{Command, Output};

use serde_json::Value;

fn hhcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hhcert"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_identity_quartic() {
    let out = hhcert(&[
        "verify-identity",
        "--f",
        "pow(x,4)",
        "--a",
        "1",
        "--b",
        "0",
        "--eta",
        "difference",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let lhs = v["result"]["lhs"].as_f64().unwrap();
    let rhs = v["result"]["rhs"].as_f64().unwrap();
    assert!((lhs - 1.0 / 30.0).abs() < 1e-10 && (rhs - 1.0 / 30.0).abs() < 1e-10);
    assert_eq!(v["version"], hhcert_core::VERSION);
    assert_eq!(v["config"]["function"], "pow(x,4)");
}

#[test]
fn bound_example() {
    let out = hhcert(&[
        "bound",
        "--theorem",
        "T2.1",
        "--q",
        "2",
        "--f",
        "pow(x,4)",
        "--a",
        "1",
        "--b",
        "0",
        "--eta",
        "difference",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let value = v["result"]["bound"]["value"].as_f64().unwrap();
    assert!((value - 24.0 / 2f64.sqrt() / 192.0).abs() < 1e-15);
    assert_eq!(v["result"]["hypothesis_pass"], true);
    assert_eq!(v["config"]["theorem"]["theorem"], "T2.1");
}

#[test]
fn poly6_suite_has_no_violations() {
    let out = hhcert(&[
        "suite", "--family", "poly6", "--trials", "1000", "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["campaign"]["violations"], 0);
    assert_eq!(v["result"]["campaign"]["trials"], 1000);
}

#[test]
fn suite_csv_columns() {
    let out = hhcert(&[
        "suite",
        "--trials",
        "3",
        "--theorem",
        "T3.2",
        "--q",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial,family,a,b,h,theorem,q,lhs,bound,ratio,hypothesis_pass"
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn failed_checks_exit_one() {
    let hh = hhcert(&["hh-classical", "--f", "-x*x", "--a", "0", "--b", "2"]);
    assert_eq!(hh.status.code(), Some(1));
    let v = json(&hh);
    assert_eq!(v["result"]["witness"]["side"], "midpoint");

    let pre = hhcert(&[
        "check-hypothesis",
        "--f",
        "-abs(x)",
        "--a",
        "-1",
        "--b",
        "1",
        "--eta",
        "difference",
    ]);
    assert_eq!(pre.status.code(), Some(1));
    let ok = hhcert(&[
        "check-hypothesis",
        "--f",
        "-abs(x)",
        "--a",
        "-1",
        "--b",
        "1",
        "--eta",
        "paper_piecewise",
    ]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["bound", "--nope"],
        &[
            "bound",
            "--theorem",
            "T2.2",
            "--q",
            "1",
            "--f",
            "x",
            "--a",
            "1",
            "--b",
            "0",
        ],
        &["verify-identity", "--f", "2x", "--a", "1", "--b", "0"],
        &["verify-identity", "--f", "x", "--a", "1"],
        &["suite", "--family", "splines"],
        &[
            "integrate",
            "--f",
            "x",
            "--a",
            "1",
            "--b",
            "0",
            "--eta",
            "scaled",
        ],
    ] {
        let out = hhcert(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"function": "exp(x)", "a": 1.0, "b": 0.0, "theorem": {"theorem": "T2.2", "q": 3.0},
            "eta": {"kind": "scaled", "lambda": 0.5}}"#,
    )
    .unwrap();
    let out = hhcert(&["bound", "--config", cfg.to_str().unwrap(), "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config"]["theorem"]["q"], 2.0);
    assert_eq!(v["config"]["eta"]["lambda"], 0.5);
    assert_eq!(v["result"]["bound"]["h"], 0.5);

    std::fs::write(&cfg, r#"{"function": "x", "colour": "blue"}"#).unwrap();
    let bad = hhcert(&["bound", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn integrate_meets_target_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = hhcert(&[
        "integrate",
        "--f",
        "exp(x)",
        "--a",
        "1",
        "--b",
        "0",
        "--target",
        "1e-9",
        "--mode",
        "sup",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let value = v["result"]["value"].as_f64().unwrap();
    assert!(v["result"]["certificate"].as_f64().unwrap() <= 1e-9);
    assert!((value - (std::f64::consts::E - 1.0)).abs() <= 1e-9);
    assert!(v["config"]["output"].get("path").is_none());
}

#[test]
fn tournament_marks_winner() {
    let out = hhcert(&[
        "tournament",
        "--f",
        "pow(x,4)",
        "--a",
        "1",
        "--b",
        "0",
        "--q-grid",
        "1,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["winner"], "T2.1");
    assert!(rows[0]["values"][1]["value"].is_null());
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(hhcert(&["--help"]).status.code(), Some(0));
    assert_eq!(hhcert(&["--version"]).status.code(), Some(0));
}
