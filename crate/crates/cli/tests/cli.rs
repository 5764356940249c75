use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use qsub_cli::config::{parse_config, parse_toml, CheckConfig};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn qsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsub"))
        .args(args)
        .env_remove("QSUB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn run_config(name: &str, out: &Path, extra: &[&str]) -> Output {
    let config = configs().join(name);
    let mut args = vec![
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    qsub(&args)
}

fn report(out: &Path, name: &str) -> serde_json::Value {
    let text = fs::read_to_string(out.join(format!("{name}.report.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn passing_checks_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config("geometric.toml", dir.path(), &["--quiet"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let r = report(dir.path(), "geometric");
    assert_eq!(r["summary"], "pass");
    let ids: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["h1", "h3", "t3.4i"]);
    let csv = fs::read_to_string(dir.path().join("geometric.trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41);
}

#[test]
fn overstated_modulus_exits_two_and_names_the_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config("overstated_modulus.toml", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(dir.path(), "overstated_modulus");
    assert_eq!(r["summary"], "fail");
    let failed: Vec<&serde_json::Value> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["holds"] == false)
        .collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["id"], "t3.4i");
    assert_eq!(failed[0]["details"]["floor"], 0.0);
    assert_eq!(failed[0]["details"]["closed_form_tau"], 0.0);
}

#[test]
fn missing_output_directory_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config("geometric.toml", &dir.path().join("absent"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));
}

#[test]
fn invalid_config_exits_one_with_field_errors() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(configs().join("geometric.toml"))
        .unwrap()
        .replace(
            "rule = \"dynamic\"\nlambda = 0.5",
            "rule = \"diminishing\"\nc = 1.0\ns = 1.5",
        );
    let path = dir.path().join("bad.toml");
    fs::write(&path, text).unwrap();
    let out = qsub(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("stepsize.s: s must lie in (0,1)"),
        "{stderr}"
    );
    assert!(stderr.contains("t3.4i requires dynamic rule"), "{stderr}");
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs().join("geometric.toml");
    let out = Command::new(env!("CARGO_BIN_EXE_qsub"))
        .args(["run", "--config", config.to_str().unwrap(), "--quiet"])
        .env("QSUB_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("geometric.report.json").exists());
    assert_eq!(
        qsub(&["run", "--config", config.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn seeded_traces_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = run_config(
            "inexact_ratio.toml",
            dir.path(),
            &["--seed", "5", "--quiet"],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let read = |d: &Path| fs::read(d.join("inexact_ratio.trace.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_eq!(report(a.path(), "inexact_ratio")["seed"], 5);
}

#[test]
fn sweep_writes_one_run_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs().join("constant_budget.toml");
    let out = qsub(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--param",
        "run.max_iter",
        "--values",
        "250,500,1000",
        "--out",
        dir.path().to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for v in ["250", "500", "1000"] {
        let name = format!("constant_budget_run.max_iter_{v}");
        assert!(dir.path().join(format!("{name}.trace.csv")).exists());
        assert_eq!(
            report(dir.path(), &name)["run"]["iterations"]
                .as_u64()
                .unwrap()
                .to_string(),
            v
        );
    }
    let sweep: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("constant_budget.sweep.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(sweep["members"].as_array().unwrap().len(), 3);
    assert_eq!(sweep["summary"], "pass");
}

#[test]
fn shipped_configs_are_valid() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, 1e-300..1e-3f64, Just(0.0)]
}

proptest! {
    #[test]
    fn printed_configs_parse_back(
        v in 1e-6..10.0f64,
        x1 in prop::collection::vec(finite(), 2),
        max_iter in 1usize..1_000_000,
        seed in proptest::option::of(any::<u64>()),
        delta in proptest::option::of(1e-9..1e3f64),
        burn_in in proptest::option::of(1usize..100),
        eta in 1e-6..1e3f64,
    ) {
        let mut config = parse_toml(&fs::read_to_string(configs().join("constant_budget.toml")).unwrap()).unwrap();
        config.stepsize.v = Some(v);
        config.run.x1 = x1;
        config.run.max_iter = max_iter;
        config.run.seed = seed;
        config.problem.sharp.as_mut().unwrap().eta = eta;
        let mut check = CheckConfig::new("k1");
        check.delta = delta;
        check.burn_in = burn_in;
        config.checks.push(check);
        prop_assert_eq!(parse_toml(&config.to_toml()).unwrap(), config);
    }
}
