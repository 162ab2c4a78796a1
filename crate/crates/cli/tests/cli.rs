use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn config(name: &str) -> String {
    root().join("configs").join(name).display().to_string()
}

fn fixture(name: &str) -> String {
    root().join("crates/core/fixtures").join(name).display().to_string()
}

fn mlpreach(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlpreach")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn floats(v: &serde_json::Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn eval_prints_forward_pass() {
    let out = mlpreach(&["eval", "--network", &fixture("tanh_demo.json"), "--point", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let y = floats(&json(&out)["output"]);
    assert!((y[0] + 3.138_077_451_185_862).abs() < 1e-12);
    assert!((y[1] - 0.6372113870256814).abs() < 1e-12);

    let out = mlpreach(&["eval", "--network", &fixture("identity2.json"), "--point", "1,2"]);
    assert_eq!(floats(&json(&out)["output"]), vec![1.0, 2.0]);
}

#[test]
fn eval_wrong_length_is_usage_error() {
    let out = mlpreach(&["eval", "--network", &fixture("tanh_demo.json"), "--point", "0.5"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn sensitivity_outputs() {
    let out = mlpreach(&["sensitivity", "--config", &config("unit_square.toml"), "--delta", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["epsilon"].as_f64(), Some(0.0));

    let out = mlpreach(&["sensitivity", "--config", &config("unit_square.toml")]);
    let doc = json(&out);
    let eps = doc["epsilon"].as_f64().unwrap();
    let net: mlpreach::Mlp64 = mlpreach::read_network_file(fixture("tanh_demo.json")).unwrap();
    let brute = mlpreach::brute_sensitivity(&net, &[0.5, 0.5], 0.1, 101).unwrap();
    assert!(brute <= eps);
    assert_eq!(doc["trace"].as_array().unwrap().len(), 2);
}

#[test]
fn missing_network_file_exits_66() {
    let out = mlpreach(&["sensitivity", "--network", "/no/such/net.json", "--point", "0,0", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(66));
    let out = mlpreach(&["eval", "--config", "/no/such/run.toml"]);
    assert_eq!(out.status.code(), Some(66));
}

#[test]
fn reach_tube_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (cfg, n) in [("unit_square_delta_0.1.toml", 25), ("unit_square_delta_0.0125.toml", 1600)] {
        let path = dir.path().join("tubes.csv");
        let out = mlpreach(&["reach", "--config", &config(cfg), "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), format!("{n} tubes"));
        let text = std::fs::read_to_string(&path).unwrap();
        let rows = text.lines().filter(|l| !l.starts_with('#')).count() - 1;
        assert_eq!(rows, n);
    }
}

#[test]
fn reach_empty_union_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, format!("network = {:?}\ndelta = 0.1\n", fixture("tanh_demo.json"))).unwrap();
    let out = mlpreach(&["reach", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let data: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data, vec!["cell_index,center_1,center_2,radius"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 tubes"));
}

#[test]
fn verify_exit_codes_follow_verdicts() {
    let out = mlpreach(&["verify", "--config", &config("wide_box_coarse.toml")]);
    assert_eq!(out.status.code(), Some(11));
    let doc = json(&out);
    assert_eq!(doc["verdict"], "UNCERTAIN");
    assert_eq!(doc["cell_count"], 15);

    let out = mlpreach(&["verify", "--config", &config("wide_box_fine.toml")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "SAFE");
    assert_eq!(json(&out)["cell_count"], 60);

    // Flags win over the config file.
    let out = mlpreach(&["verify", "--config", &config("wide_box_coarse.toml"), "--delta", "0.05"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_unsafe_exits_10_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.toml");
    std::fs::write(
        &cfg,
        format!(
            "network = {:?}\ndelta = 0.1\nspec = [{{ max = -3.5 }}, {{}}]\n[[input]]\nbounds = [[0.0, 1.0], [0.0, 1.0]]\n",
            fixture("tanh_demo.json")
        ),
    )
    .unwrap();
    let out = mlpreach(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(10));
    let doc = json(&out);
    assert_eq!(doc["verdict"], "UNSAFE");
    let net: mlpreach::Mlp64 = mlpreach::read_network_file(fixture("tanh_demo.json")).unwrap();
    let y = mlpreach::forward(&net, &floats(&doc["input"])).unwrap();
    assert_eq!(y, floats(&doc["output"]));
    assert!(y[0] > -3.5);
}

#[test]
fn verify_without_spec_is_usage_error() {
    let out = mlpreach(&["verify", "--config", &config("unit_square.toml")]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn bad_invocations_are_usage_errors() {
    assert_eq!(mlpreach(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(mlpreach(&["reach", "--delta", "x"]).status.code(), Some(64));
    assert_eq!(mlpreach(&["reach", "--config", &config("unit_square.toml"), "--delta", "0"]).status.code(), Some(64));
    assert_eq!(mlpreach(&["eval", "--config", &config("unit_square.toml"), "--workers", "0"]).status.code(), Some(64));
}

#[test]
fn sample_reports() {
    let out = mlpreach(&["sample", "--config", &config("unit_square.toml"), "--samples", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["sample_count"], 10000);
    assert!(doc["violations"].as_array().unwrap().is_empty());

    let out = mlpreach(&["sample", "--config", &config("unit_square.toml"), "--samples", "0"]);
    let doc = json(&out);
    assert_eq!(doc["sample_count"], 0);
    assert!(doc["violations"].as_array().unwrap().is_empty());
}

#[test]
fn sample_detects_truncated_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    let out = mlpreach(&["reach", "--config", &config("unit_square.toml"), "--out", full.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    // Keep the comment line, the header and the first five tubes only.
    let text = std::fs::read_to_string(&full).unwrap();
    let truncated: String = text.lines().take(7).map(|l| format!("{l}\n")).collect();
    let cut = dir.path().join("cut.csv");
    std::fs::write(&cut, truncated).unwrap();
    let out = mlpreach(&["sample", "--config", &config("unit_square.toml"), "--tubes", cut.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(!doc["violations"].as_array().unwrap().is_empty());
    assert!(doc["max_observed_deviation"].as_f64().unwrap() > 0.0);
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let run = |w: &str| mlpreach(&["reach", "--config", &config("unit_square_delta_0.025.toml"), "--workers", w]).stdout;
    assert_eq!(run("1"), run("4"));
    let run = |w: &str| mlpreach(&["sample", "--config", &config("unit_square.toml"), "--seed", "3", "--workers", w]).stdout;
    assert_eq!(run("1"), run("3"));
}

#[test]
fn gen_arm_data_rows() {
    let out = mlpreach(&["gen-arm-data", "--config", &config("arm.toml"), "--grid", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta1,theta2,x,y"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 9);
    for r in rows {
        let (x, y) = (10.0 * r[0].cos() + 7.0 * (r[0] + r[1]).cos(), 10.0 * r[0].sin() + 7.0 * (r[0] + r[1]).sin());
        assert!((x - r[2]).abs() < 1e-12 && (y - r[3]).abs() < 1e-12);
        assert!(x * x + y * y <= 17.0f64.powi(2) + 1e-9);
    }
}

#[test]
fn arm_config_verifies_safe() {
    let out = mlpreach(&["verify", "--config", &config("arm.toml")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
