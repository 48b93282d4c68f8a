use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use retcache::scenario_io::{load_report, SWEEP_CSV_HEADER};
use retcache::{build_z_table, CachingPlan, ScenarioConfig};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retcache"))
        .args(args)
        .env_remove("RETCACHE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn out_arg(dir: &Path) -> String {
    dir.join("out").to_str().unwrap().to_string()
}

#[test]
fn plan_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["plan", "--timing", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("planner=dp total="), "{stdout}");

    let report = load_report(&fs::read_to_string(dir.path().join("out/plan_report.json")).unwrap())
        .unwrap();
    assert!(report.feasible);
    assert_eq!(report.scenario, ScenarioConfig::default());
    assert!(report.timing_ms.unwrap() < 1000.0);
    assert!((report.download_cost + report.storage_cost - report.total_cost).abs() < 1e-9);
    assert!(report.plan.has_nonincreasing_rows());
}

#[test]
fn prohibitive_storage_gives_empty_plan() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", r#"{"storage_weight": 10}"#);

    let (s, d) = ScenarioConfig {
        storage_weight: 10.0,
        ..ScenarioConfig::default()
    }
    .build()
    .unwrap();
    let z = build_z_table(&s, &d).unwrap();
    for c in 0..s.num_contents {
        for h in 1..=s.num_helpers {
            assert!(z.get(c, 0) < z.get(c, h));
        }
    }

    let out = run(&["plan", "--config", &config, "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let report = load_report(&fs::read_to_string(dir.path().join("out/plan_report.json")).unwrap())
        .unwrap();
    assert_eq!(report.plan, CachingPlan::zeros(100, 24));
    assert!((report.total_cost - 240.0).abs() < 1e-9);
}

#[test]
fn missing_config_exits_2_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "plan",
        "--config",
        dir.path().join("nope.json").to_str().unwrap(),
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn invalid_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad_f = write_config(
        dir.path(),
        "f.json",
        r#"{"num_slots": 2, "storage_cost": {"kind": "table", "values": [2, 1]}}"#,
    );
    let out = run(&["plan", "--config", &bad_f, "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing"));

    let malformed = write_config(dir.path(), "m.json", "{\"num_contents\": ");
    let out = run(&["plan", "--config", &malformed, "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sweep",
        "--param",
        "H",
        "--values",
        "4,8,12,16,20",
        "--seeds",
        "5",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/sweep_H.csv")).unwrap();
    assert_eq!(csv, String::from_utf8(out.stdout).unwrap());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], SWEEP_CSV_HEADER);
    assert_eq!(lines.len(), 6);
    let dp: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(dp.windows(2).all(|p| p[1] < p[0]), "{dp:?}");
}

#[test]
fn sweep_uses_config_block_and_rejects_unknown_param() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "s.json",
        r#"{"num_contents": 20, "sweep": [{"param": "gamma", "values": [0.5, 1.5]}]}"#,
    );
    let out = run(&["sweep", "--config", &config, "--seeds", "2", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("out/sweep_gamma.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("gamma,0.5,"));

    let out = run(&["sweep", "--param", "K", "--values", "1", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["sweep", "--param", "R", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_small_and_oversize() {
    let dir = tempfile::tempdir().unwrap();
    let small = write_config(
        dir.path(),
        "small.json",
        r#"{"num_contents": 2, "num_requesters": 2, "num_helpers": 2,
            "cache_size_per_helper": 1, "num_slots": 2, "storage_weight": 0.05,
            "demand": {"kind": "matrix", "rows": [[0.7, 0.3], [0.4, 0.6]]}}"#,
    );
    let out = run(&["verify", "--config", &small, "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("OK"));
    let report =
        load_report(&fs::read_to_string(dir.path().join("out/verify_report.json")).unwrap())
            .unwrap();
    let verdict = report.oracle.unwrap();
    assert!(verdict.agrees);
    assert_eq!(verdict.search_space, 81);

    let big = write_config(dir.path(), "big.json", r#"{"num_contents": 5, "num_slots": 3}"#);
    let out = run(&["verify", "--config", &big, "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the limit"));
}

#[test]
fn simulate_saved_plan() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", r#"{"num_contents": 30, "num_helpers": 6}"#);
    let out_dir = out_arg(dir.path());
    assert!(run(&["plan", "--config", &config, "--planner", "popular", "--out", &out_dir])
        .status
        .success());
    let plan_path = dir.path().join("out/plan_report.json");
    let out = run(&[
        "simulate",
        "--config",
        &config,
        "--plan",
        plan_path.to_str().unwrap(),
        "--trials",
        "5000",
        "--seed",
        "4",
        "--out",
        &out_dir,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report =
        load_report(&fs::read_to_string(dir.path().join("out/simulation_report.json")).unwrap())
            .unwrap();
    assert_eq!(report.planner, "popular");
    let sim = report.simulation.unwrap();
    assert_eq!(sim.trials, 5000);
    assert!(sim.z_score.unwrap().abs() < 5.0);
    assert!((sim.analytic_download_cost - report.download_cost).abs() < 1e-9);
}

#[test]
fn compare_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", r#"{"num_contents": 40}"#);
    let out = run(&["compare", "--config", &config, "--seeds", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["dp", "popular", "random"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{text}");
    }
    assert!(text.contains("chacha8"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", r#"{"num_contents": 10}"#);
    let target = dir.path().join("env-out");
    let out = Command::new(env!("CARGO_BIN_EXE_retcache"))
        .args(["plan", "--config", &config])
        .env("RETCACHE_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("plan_report.json").exists());
}
