use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn spacs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spacs")).args(args).output().expect("binary runs")
}

fn config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn shipped(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

fn error_object(out: &Output) -> Value {
    serde_json::from_slice::<Value>(&out.stderr).expect("stderr is one JSON object")["error"].clone()
}

fn wigner_rows(text: &str) -> Vec<(f64, f64, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,p,w"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect()
}

#[test]
fn simulate_single_reports_expected_rate() {
    let out = spacs(&["simulate", "--config", &shipped("single.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let p = report["heralds"][0]["probability"].as_f64().unwrap();
    assert!((p / 2e-4 - 1.0).abs() < 1e-3, "p = {p}");
    // defaults are echoed back
    assert!(report["config"]["truncations"]["signal"].as_u64().is_some());
}

#[test]
fn simulate_writes_identical_bytes_twice() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = spacs(&["simulate", "--config", &shipped("cascade.json"), "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn malformed_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "bad.json", r#"{"schema_version":1,"kind":"single","alpha":1.0,"lambda":"x"}"#);
    let out = spacs(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_object(&out)["path"], "lambda");

    let cfg = config(&dir, "typo.json", r#"{"schema_version":1,"kind":"single","alpha":1.0,"lambda":0.01,"truncations":{"signl":20}}"#);
    let out = spacs(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_object(&out)["path"].as_str().unwrap().starts_with("truncations"));
}

#[test]
fn missing_config_file_is_exit_2() {
    let out = spacs(&["simulate", "--config", "/nonexistent/spacs.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_object(&out)["kind"], "io");
}

#[test]
fn guard_violation_is_exit_3() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "g.json", r#"{"schema_version":1,"kind":"single","alpha":1.0,"lambda":0.7}"#);
    let out = spacs(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_object(&out)["exit_code"], 3);
}

#[test]
fn leakage_is_exit_4() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "leak.json",
        r#"{"schema_version":1,"kind":"single","alpha":0.0,"lambda":0.45,"truncations":{"signal":10,"idler":2}}"#,
    );
    let out = spacs(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_object(&out)["kind"], "norm-leakage");
}

#[test]
fn zero_coupling_gives_undefined_heralds() {
    let out = spacs(&["simulate", "--config", &shipped("vacuum.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    for h in report["heralds"].as_array().unwrap() {
        assert_eq!(h["probability"].as_f64(), Some(0.0));
        assert_eq!(h["defined"], false);
    }
}

#[test]
fn wigner_vacuum_grid() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("w.csv");
    let out = spacs(&["wigner", "--config", &shipped("vacuum.json"), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let rows = wigner_rows(&text);
    assert_eq!(rows.len(), 81 * 81);
    // p-major: x runs fastest
    assert_eq!((rows[0].0, rows[0].1), (-4.0, -4.0));
    assert_eq!((rows[1].0, rows[1].1), (-3.9, -4.0));
    assert_eq!(rows[81].1, -3.9);

    let (x, p, max) = rows.iter().copied().fold((0.0, 0.0, f64::MIN), |m, r| if r.2 > m.2 { r } else { m });
    assert_eq!((x, p), (0.0, 0.0));
    assert!((max - 2.0 / std::f64::consts::PI).abs() < 1e-9);
    let integral: f64 = rows.iter().map(|r| r.2).sum::<f64>() * 0.1 * 0.1;
    assert!((integral - 1.0).abs() < 0.02, "integral {integral}");
}

#[test]
fn wigner_heralded_spacs_goes_negative() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("w.csv");
    let out = spacs(&["wigner", "--config", &shipped("wigner_spacs.json"), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = wigner_rows(&std::fs::read_to_string(&csv).unwrap());
    let min = rows.iter().map(|r| r.2).fold(f64::MAX, f64::min);
    assert!(min < 0.0);
    let step = rows[1].0 - rows[0].0;
    let integral: f64 = rows.iter().map(|r| r.2).sum::<f64>() * step * step;
    assert!((integral - 1.0).abs() < 0.02, "integral {integral}");
}

#[test]
fn wigner_of_two_mode_target_is_exit_3() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("w.csv");
    let out = spacs(&["wigner", "--config", &shipped("ecs_dual.json"), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_csv_scales_as_lambda_squared() {
    let out = spacs(&[
        "sweep", "--config", &shipped("single.json"), "--param", "lambda", "--values", "0.02,0.01,0.005", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("value,herald,probability,defined"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 3);
    for w in rows.windows(2) {
        let expected = (w[1].0 / w[0].0).powi(2);
        assert!(((w[1].1 / w[0].1) / expected - 1.0).abs() < 0.01);
    }
}

#[test]
fn sweep_rejects_unknown_parameter() {
    let out = spacs(&["sweep", "--config", &shipped("single.json"), "--param", "temperature", "--values", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schema_is_json_with_config_fields() {
    let out = spacs(&["schema"]);
    assert_eq!(out.status.code(), Some(0));
    let schema: Value = serde_json::from_slice(&out.stdout).unwrap();
    for field in ["schema_version", "kind", "alpha", "lambda", "truncations"] {
        assert!(schema["properties"].get(field).is_some(), "missing {field}");
    }
}

#[test]
fn verify_prints_table_and_exit_status_matches_it() {
    let out = spacs(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let checks: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert_eq!(checks.len(), 10);
    assert!(text.contains("p_2^2 measured"));
    let all = checks.iter().all(|l| l.starts_with("PASS"));
    assert_eq!(out.status.code(), Some(if all { 0 } else { 1 }));
}
