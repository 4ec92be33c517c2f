use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nlft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlft")).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn forward_writes_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("F.json");
    fs::write(&input, r#"{"offset": 0, "entries": [[0.5, 0.0], [0.5, 0.0]]}"#).unwrap();
    let out = nlft(&["forward", "--in", input.to_str().unwrap(), "--grid", "4096", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("nlft_out.json"));
    // a = (4/3)(1 + z^-1 / 4), b = (2/3)(1 + z)
    assert_eq!(v["a"]["lo"], -1);
    let a = v["a"]["coeffs"].as_array().unwrap();
    assert!((a[0][0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!((a[1][0].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-15);
    assert_eq!(v["b"]["lo"], 0);
    assert!(v["su11_residual"].as_f64().unwrap() < 1e-15);
    assert_eq!(v["seed"], 0);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("F.json");
    fs::write(&input, r#"{"offset": 0, "entries": [[1.0, 0.0]]}"#).unwrap();
    let out = nlft(&["forward", "--in", input.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("is not < 1"));

    let out = nlft(&["forward", "--in", "missing.json", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = nlft(&["forward", "--in", input.to_str().unwrap(), "--grid", "1000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_and_echoes_the_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = nlft(&["verify", "--suite", "inverse", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ra = fs::read(a.path().join("inverse_report.json")).unwrap();
    let rb = fs::read(b.path().join("inverse_report.json")).unwrap();
    assert_eq!(ra, rb);
    let v = json(&a.path().join("inverse_report.json"));
    assert_eq!(v["seed"], 7);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_rejects_unknown_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlft(&["verify", "--suite", "nope", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invert_recovers_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("F.json");
    fs::write(&input, r#"{"offset": 1, "entries": [[0.2, 0.1], [0.0, 0.0], [-0.1, 0.05]]}"#).unwrap();
    let out = nlft(&["invert", "--in", input.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("invert_out.json"));
    assert!(v["max_error"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["recovered"]["offset"], 1);
}

#[test]
fn opuc_writes_weight_and_oscillation() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("gamma.json");
    fs::write(&input, "[[0.3, 0.1], [-0.2, 0.0], [0.1, 0.4]]").unwrap();
    let out = nlft(&["opuc", "--in", input.to_str().unwrap(), "--grid", "256", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("opuc_report.json"));
    assert!(v["connection_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["wall_residual"].as_f64().unwrap() < 1e-12);
    let w = fs::read_to_string(dir.path().join("w.csv")).unwrap();
    assert_eq!(w.lines().next(), Some("theta,value"));
    assert_eq!(w.lines().count(), 257);
    assert!(dir.path().join("phi_osc.csv").exists());
}

#[test]
fn scan_of_zero_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("F.json");
    fs::write(&input, r#"{"offset": 0, "entries": []}"#).unwrap();
    let out = nlft(&["scan", "--in", input.to_str().unwrap(), "--grid", "64", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("scan_summary.json"));
    assert_eq!(v["summary"]["max_arg_osc"], 0.0);
}

#[test]
fn daisy_pipeline_writes_its_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("daisy.toml");
    fs::write(
        &config,
        "[schedule]\nnu = [8]\ndelta = [0.3]\neps = [0.1]\nmu = 0.5\n\n[grid]\ncertify = 512\nscan = 512\n",
    )
    .unwrap();
    let out = nlft(&["daisy", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("report.json"));
    assert_eq!(v["h"]["levels"][0]["nu"], 8);
    assert!(v["h"]["levels"][0]["truncations"].as_array().unwrap().len() == 8);
    let osc = fs::read_to_string(dir.path().join("oscillation.csv")).unwrap();
    assert_eq!(osc.lines().next(), Some("theta,arg_osc,a_osc,b_osc"));
    let growth = fs::read_to_string(dir.path().join("growth_table.csv")).unwrap();
    assert_eq!(growth.lines().next(), Some("nu,j,min_arc_arg"));
}

#[test]
fn daisy_config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("daisy.toml");
    fs::write(&config, "[schedule]\nnu = [6]\ndelta = [0.3]\neps = [0.1]\nmu = 0.5\n").unwrap();
    let out = nlft(&["daisy", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("multiple of 4"));
}
