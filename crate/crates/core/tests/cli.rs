//! End-to-end runs of the `realpw` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const INTERVAL: &str = r#"{"source":"builtin","builtin":{"kind":"spectral_bump","support":{"shape":"box","lo":[-1.0],"hi":[1.0]},"taper":0.003},"grid":{"d":1,"M":1024,"h":2.0}}"#;

fn interval_input() -> Value {
    serde_json::from_str(INTERVAL).unwrap()
}

fn run(dir: &Path, command: &str, config: &Value, extra: &[&str]) -> Output {
    let path = dir.join(format!("{command}.json"));
    std::fs::write(&path, serde_json::to_string(config).unwrap()).unwrap();
    Command::new(env!("CARGO_BIN_EXE_realpw"))
        .arg(command)
        .arg("--config")
        .arg(&path)
        .args(extra)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn estimate_reports_limits_near_r() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({"input": interval_input(), "poly": ["x1", "x1^2"], "p": [1, 2, "inf"], "n_max": 64});
    let out = run(dir.path(), "estimate", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rep = report(&out);
    assert_eq!(rep["command"], "estimate");
    for entry in rep["result"]["entries"].as_array().unwrap() {
        for v in entry["verdicts"].as_array().unwrap() {
            assert_eq!(v["within_tolerance"], true, "{v}");
        }
    }
    assert!(rep["metadata"]["version"].is_string());
}

#[test]
fn report_goes_to_the_out_path() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({"input": interval_input(), "poly": "x1", "n_max": 16});
    let out = run(dir.path(), "estimate", &cfg, &["--out", "report.json", "--p", "inf"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(rep["config"]["p"], json!(["inf"]));
}

#[test]
fn malformed_polynomial_names_the_offset() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({"input": interval_input(), "poly": ["x1^"]});
    let out = run(dir.path(), "estimate", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("poly[0]") && err.contains("offset 3"), "{err}");
}

#[test]
fn too_few_iterations_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({"input": interval_input(), "poly": ["x1"], "n_max": 4});
    let out = run(dir.path(), "estimate", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n_max"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({"input": interval_input(), "poly": ["x1"], "nmax": 16});
    assert_eq!(run(dir.path(), "estimate", &cfg, &[]).status.code(), Some(2));
}

#[test]
fn missing_config_is_an_io_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_realpw"))
        .args(["estimate", "--config", "/nonexistent/realpw/config.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reconstruct_needs_a_family() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({"input": interval_input(), "n_max": 16});
    let out = run(dir.path(), "reconstruct", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("family"));
}

#[test]
fn reconstruct_with_reference_reports_metrics_and_writes_the_mask() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "input": interval_input(),
        "n_max": 32,
        "family": {"scheme": "explicit", "polys": ["x1", "x1 - 0.5*i", "x1 + 0.5*i"]},
        "reference": {"kind": "input"},
        "output": {"report": "rec.json"},
    });
    let out = run(dir.path(), "reconstruct", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rec.json")).unwrap()).unwrap();
    let metrics = &rep["result"]["reconstruction"]["metrics"];
    // the slack widens [-1, 1] by 3% of R = 1, about ten cells at this spacing
    let slack_cells = 0.03 / (2.0 * std::f64::consts::PI / 2048.0);
    assert!(metrics["dilation_distance"].as_f64().unwrap() <= slack_cells + 2.0, "{metrics}");
    assert_eq!(metrics["estimated_components"], 1);
    let mask = realpw::io::read_mask(dir.path().join("rec.mask.json")).unwrap();
    assert_eq!(mask.count() as u64, metrics["estimated_cells"].as_u64().unwrap());
}

fn spatial_unit_interval(t: Value) -> Value {
    json!({
        "input": {"source": "builtin", "builtin": {"kind": "spatial_bump", "support": {"shape": "box", "lo": [0.0], "hi": [1.0]}, "taper": 0.002}, "grid": {"d": 1, "M": 1024, "h": 0.0041}},
        "complex": {"x0": [[0.0], [0.5]], "t": t},
        "output": {"report": "cg.json"},
    })
}

#[test]
fn complex_growth_defaults_y_in_one_dimension() {
    let dir = TempDir::new().unwrap();
    let cfg = spatial_unit_interval(json!({"start": 10.0, "stop": 40.0, "count": 31}));
    let out = run(dir.path(), "complex-growth", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("cg.json")).unwrap()).unwrap();
    let result = &rep["result"];
    assert!(result["notes"][0].as_str().unwrap().contains("y omitted"));
    for fit in result["fits"].as_array().unwrap() {
        let slope = fit["fit"]["slope"].as_f64().unwrap();
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }
    let csv = std::fs::read_to_string(dir.path().join("cg.csv")).unwrap();
    assert!(csv.starts_with("x0_index,t,log_abs\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 31);
}

#[test]
fn complex_growth_rejects_t_beyond_the_guard() {
    let dir = TempDir::new().unwrap();
    let cfg = spatial_unit_interval(json!({"start": 10.0, "stop": 1.0e6, "count": 5}));
    let out = run(dir.path(), "complex-growth", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("complex.t"));
}

#[test]
fn runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({"input": interval_input(), "poly": ["x1", "0.5 + 2*i*x1"], "p": [1, 3.5, "inf"], "n_max": 24});
    let a = report(&run(dir.path(), "estimate", &cfg, &[]));
    let b = report(&run(dir.path(), "estimate", &cfg, &[]));
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["config"], b["config"]);
}

#[test]
fn verify_skips_the_under_resolved_member() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({"p": [2], "n_max": 32, "verify": {"include_under_resolved": true, "members": ["interval", "under-resolved"]}});
    let out = run(dir.path(), "verify", &cfg, &[]);
    let rep = report(&out);
    let result = &rep["result"];
    assert_eq!(result["columns"], json!(["interval", "under-resolved"]));
    let status = |row: &str, col: usize| -> String {
        let r = result["rows"].as_array().unwrap().iter().find(|r| r["property"] == row).unwrap();
        r["cells"][col]["status"].as_str().unwrap().to_string()
    };
    assert_eq!(status("parseval", 0), "pass");
    assert_eq!(status("limit", 0), "pass");
    assert_eq!(status("limit", 1), "skipped");
    assert!(stderr(&out).contains("under-resolved"));
    let expected = if result["all_pass"] == true { 0 } else { 1 };
    assert_eq!(out.status.code(), Some(expected));
}
