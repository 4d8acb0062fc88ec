mod common;

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn qakns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qakns"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn shipped(name: &str) -> String {
    common::configs_dir().join(name).to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn all_pass_config_exits_zero() {
    let out = qakns(&["verify", "--config", &shipped("triangular.json"), "--check", "core", "--check", "tau.direct"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn report_schema() {
    let out = qakns(&["tau", "--config", &shipped("triangular.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        for key in ["name", "params", "status", "max_degree_verified", "first_failure", "ms"] {
            assert!(c.get(key).is_some(), "missing {key} in {c}");
        }
        assert!(c["name"].as_str().unwrap().starts_with("tau."));
        assert_eq!(c["status"], "pass");
        assert!(c["first_failure"].is_null());
    }
}

#[test]
fn identical_configs_hash_identically() {
    let text = std::fs::read_to_string(shipped("constant_potential.json")).unwrap();
    let a = config_file(&text);
    let b = config_file(&text);
    let run = |f: &tempfile::NamedTempFile| {
        json(&qakns(&["verify", "--config", f.path().to_str().unwrap(), "--check", "core.z_invert", "--format", "json"]))
    };
    let (ra, rb) = (run(&a), run(&b));
    assert_eq!(ra["config_hash"], rb["config_hash"]);
    let defaults = json(&qakns(&["verify", "--check", "core.z_invert", "--format", "json"]));
    assert_eq!(ra["config_hash"], defaults["config_hash"]);
}

#[test]
fn failing_check_exits_one_with_location() {
    let out = qakns(&[
        "dressing",
        "--check",
        "classical.dressing",
        "--inject",
        "corrupt_dressing",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let failed: Vec<&Value> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .collect();
    assert!(!failed.is_empty());
    let f = &failed[0]["first_failure"];
    for key in ["z_degree", "x_degree", "row", "col", "value"] {
        assert!(f.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn config_errors_exit_two() {
    let equal = config_file(r#"{"a": ["1", "1"]}"#);
    let out = qakns(&["verify", "--config", equal.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("distinct eigenvalues"));

    let diagonal = config_file(r#"{"u": [[["1"], ["1"]], [["1"], []]]}"#);
    let out = qakns(&["verify", "--config", diagonal.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("u_ii=0"));

    let garbage = config_file("{ not json");
    assert_eq!(qakns(&["verify", "--config", garbage.path().to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(qakns(&["verify", "--inject", "nonsense"]).status.code(), Some(2));
    assert_eq!(qakns(&["verify", "--format", "yaml"]).status.code(), Some(2));
    assert_eq!(qakns(&["verify", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
}

#[test]
fn empty_selection_is_an_empty_pass() {
    let empty = config_file(r#"{"checks": []}"#);
    let out = qakns(&["verify", "--config", empty.path().to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["checks"].as_array().unwrap().len(), 0);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let strip = |mut v: Value| {
        for c in v["checks"].as_array_mut().unwrap() {
            c["ms"] = Value::Null;
        }
        v
    };
    let args = ["resolvent", "--config", &shipped("linear_potential.json"), "--format", "json"];
    let a = strip(json(&qakns(&args)));
    let b = strip(json(&qakns(&args)));
    assert_eq!(a, b);
}

#[test]
fn text_format_is_a_table() {
    let out = qakns(&["demo", "--check", "core.power_additivity"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("config "));
    assert!(text.contains("core.power_additivity"));
    assert!(text.trim_end().ends_with("checks passed"));
}
