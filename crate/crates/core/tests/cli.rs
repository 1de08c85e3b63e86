use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use simsat_core::harness::config::{bilinear_transversal, curved_endpoint, ExperimentConfig};

fn simsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simsat"))
        .args(args)
        .env_remove("SIMSAT_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn shipped_configs_match_presets() {
    let cases = [
        ("bilinear_transversal.json", bilinear_transversal()),
        ("curved_endpoint.json", curved_endpoint(false)),
        ("flat_endpoint_control.json", curved_endpoint(true)),
    ];
    for (file, preset) in cases {
        let loaded = ExperimentConfig::load(&config_path(file)).unwrap();
        assert_eq!(loaded, preset, "{file}");
    }
}

#[test]
fn verify_lemmas_exit_codes() {
    let ok = simsat(&["verify-lemmas", "--n", "2", "--m", "2"]);
    assert_eq!(ok.status.code(), Some(0), "{}", text(&ok.stdout));
    assert!(text(&ok.stdout).lines().all(|l| l.starts_with("PASS")));
    let bad = simsat(&["verify-lemmas", "--n", "9", "--m", "2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(simsat(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(simsat(&["verify-lemmas", "--n", "x"]).status.code(), Some(2));
    assert_eq!(simsat(&[]).status.code(), Some(2));
    let missing = simsat(&["restriction-sweep", "--config", "/nonexistent/config.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn under_resolved_sweep_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = bilinear_transversal();
    cfg.grid_points = Some(8);
    let path = dir.path().join("coarse.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = simsat(&["restriction-sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("under-resolved"), "{}", text(&out.stderr));
}

#[test]
fn sweep_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_path("bilinear_transversal.json");
    let out = simsat(&[
        "restriction-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}{}", text(&out.stdout), text(&out.stderr));
    let csv = dir.path().join("bilinear_transversal.csv");
    assert!(dir.path().join("bilinear_transversal.manifest.json").is_file());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bilinear_transversal.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 3);

    let report = simsat(&["report", "--in", csv.to_str().unwrap()]);
    assert_eq!(report.status.code(), Some(0));
    let body = text(&report.stdout);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("experiment_id,log_lambda,log_norm"));
    let first: Vec<f64> = lines.next().unwrap().split(',').skip(1).map(|x| x.parse().unwrap()).collect();
    assert!((first[0] - 16f64.ln()).abs() < 1e-12);

    std::fs::write(&csv, "experiment_id,lambda\n").unwrap();
    let broken = simsat(&["report", "--in", csv.to_str().unwrap()]);
    assert_eq!(broken.status.code(), Some(2));
    assert!(text(&broken.stderr).contains(":1:"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_path("bilinear_transversal.json");
    let out = Command::new(env!("CARGO_BIN_EXE_simsat"))
        .args(["restriction-sweep", "--config", cfg.to_str().unwrap()])
        .env("SIMSAT_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("bilinear_transversal.csv").is_file());
}

#[test]
fn run_system_and_kernel_decay() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("random.json", r#"{"kind": "random", "n": 2, "m": 2, "h": 3, "seed": 5}"#),
        ("diagonal.json", r#"{"kind": "diagonal", "n": 3, "m": 2, "bound": 1.5}"#),
        ("odd.json", r#"{"kind": "random", "n": 2, "m": 3, "h": 2, "seed": 1}"#),
    ] {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        let out = simsat(&["run-system", "--config", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", text(&out.stdout));
    }
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "random", "n": 2}"#).unwrap();
    assert_eq!(simsat(&["run-system", "--config", bad.to_str().unwrap()]).status.code(), Some(2));

    let decay = simsat(&["kernel-decay", "--surface", "paraboloid", "--lambdas", "32,64,128"]);
    assert_eq!(decay.status.code(), Some(0), "{}", text(&decay.stdout));
    assert_eq!(simsat(&["kernel-decay", "--surface", "torus"]).status.code(), Some(2));
    assert_eq!(
        simsat(&["kernel-decay", "--surface", "paraboloid", "--lambdas", "32,64"]).status.code(),
        Some(2)
    );
}
