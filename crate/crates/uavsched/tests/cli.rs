use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use uavsched::io::{read_plan, scenario_hash, sidecar_path, write_json, write_scenario, ScenarioFile, ValidationFile};
use uavsched_core::gen::fixtures::line3;
use uavsched_core::scenario::Delivery;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uavsched"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn generate(dir: &Path, scale: &str, seed: u64, count: usize) -> Vec<PathBuf> {
    let o = run(
        dir,
        &["generate", "--scale", scale, "--seed", &seed.to_string(), "--count", &count.to_string(), "--out-dir", "scen"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir.join("scen"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .collect();
    files.sort();
    files
}

#[test]
fn small_batch_of_twenty_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "small", 1, 20);
    assert_eq!(files.len(), 20);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scen/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 20);
    assert_eq!(manifest["seeds"].as_array().unwrap().len(), 20);
}

#[test]
fn same_seed_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let fa = generate(a.path(), "small", 9, 1);
    let fb = generate(b.path(), "small", 9, 1);
    assert_eq!(std::fs::read(&fa[0]).unwrap(), std::fs::read(&fb[0]).unwrap());
}

#[test]
fn unknown_scale_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["generate", "--scale", "huge", "--out-dir", "x"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn plan_writes_a_passing_sidecar_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "small", 2, 1);
    let scen = files[0].to_str().unwrap();
    for algo in ["greedy", "insertion"] {
        let plan = format!("{algo}.json");
        let o = run(dir.path(), &["plan", scen, "--algo", algo, "--out", &plan]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let sidecar = sidecar_path(&dir.path().join(&plan));
        let v: ValidationFile = serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
        assert!(v.valid);
        assert_eq!(v.violations, 0);
        let o = run(dir.path(), &["validate", scen, &plan]);
        assert_eq!(code(&o), 0);
        let o = run(dir.path(), &["evaluate", scen, &plan]);
        assert_eq!(code(&o), 0);
        let ev: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let pf = read_plan(&dir.path().join(&plan)).unwrap();
        assert_eq!(ev["report"]["theta"].as_f64().unwrap(), pf.theta);
    }
}

#[test]
fn tampered_plan_fails_validation_with_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "small", 2, 1);
    let scen = files[0].to_str().unwrap();
    assert_eq!(code(&run(dir.path(), &["plan", scen, "--algo", "greedy", "--out", "p.json"])), 0);
    let mut pf = read_plan(&dir.path().join("p.json")).unwrap();
    let track = pf
        .plan
        .tracks
        .iter_mut()
        .find(|t| t.battery.iter().any(|&b| b > 0.0))
        .unwrap();
    track.battery[1] = -5.0;
    write_json(&dir.path().join("bad.json"), &pf).unwrap();
    let o = run(dir.path(), &["validate", scen, "bad.json"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let v: ValidationFile = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v.valid);
}

#[test]
fn plan_for_another_scenario_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "small", 2, 2);
    let (a, b) = (files[0].to_str().unwrap(), files[1].to_str().unwrap());
    assert_eq!(code(&run(dir.path(), &["plan", a, "--algo", "greedy", "--out", "p.json"])), 0);
    let o = run(dir.path(), &["validate", b, "p.json"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not"));
}

#[test]
fn exit_codes_for_infeasible_and_limits() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = line3();
    s.payloads[1].delivery = Some(Delivery {
        target: 2,
        earliest: 1,
        latest: 1,
    });
    write_scenario(&dir.path().join("late.json"), &ScenarioFile::new(s)).unwrap();
    let o = run(dir.path(), &["plan", "late.json", "--algo", "greedy", "--out", "p.json"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("p.json").exists());
    let o = run(dir.path(), &["plan", "late.json", "--algo", "exact", "--out", "p.json"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));

    let files = generate(dir.path(), "small", 2, 1);
    let o = run(dir.path(), &["plan", files[0].to_str().unwrap(), "--algo", "exact", "--out", "x.json"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn exact_respects_node_budget() {
    let dir = tempfile::tempdir().unwrap();
    write_scenario(&dir.path().join("l.json"), &ScenarioFile::new(line3())).unwrap();
    let o = run(dir.path(), &["plan", "l.json", "--algo", "exact", "--out", "p.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_plan(&dir.path().join("p.json")).unwrap().theta, 3.0);
    let o = run(dir.path(), &["plan", "l.json", "--algo", "exact", "--node-budget", "1", "--out", "q.json"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn zero_alpha_plans_deliveries_only() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "small", 4, 1);
    let scen = files[0].to_str().unwrap();
    let o = run(dir.path(), &["plan", scen, "--algo", "greedy", "--alpha", "0,0", "--out", "p.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let pf = read_plan(&dir.path().join("p.json")).unwrap();
    assert_eq!(pf.alpha, Some(vec![0.0, 0.0]));
    assert_eq!(pf.plan.deliveries.len(), 7);
}

#[test]
fn greedy_on_a_large_scenario_is_fast() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "large", 1, 1);
    let t = Instant::now();
    let o = run(dir.path(), &["plan", files[0].to_str().unwrap(), "--algo", "greedy", "--out", "p.json"]);
    assert!(t.elapsed().as_secs() < 60);
    assert!(matches!(code(&o), 0 | 2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn batch_plan_into_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "small", 5, 3);
    let mut args = vec!["plan", "--algo", "insertion", "--out-dir", "plans"];
    let names: Vec<String> = files.iter().map(|f| f.to_str().unwrap().to_string()).collect();
    args.extend(names.iter().map(String::as_str));
    let o = run(dir.path(), &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in &files {
        let stem = f.file_stem().unwrap().to_str().unwrap();
        assert!(dir.path().join(format!("plans/{stem}.insertion.plan.json")).exists());
    }
    let o = run(dir.path(), &["plan", &names[0], &names[1], "--out", "one.json"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn report_has_columns_for_both_heuristics() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "small", 6, 1);
    let scen = files[0].to_str().unwrap();
    for algo in ["greedy", "insertion"] {
        let o = run(dir.path(), &["plan", scen, "--algo", algo, "--out", &format!("{algo}.json")]);
        assert_eq!(code(&o), 0);
    }
    let o = run(dir.path(), &["report", "greedy.json", "insertion.json", "--scenarios", scen, "--out-dir", "rep"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("rep/comparison.csv")).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    for col in [
        "coverage_norm_greedy",
        "monitoring_norm_greedy",
        "coverage_norm_insertion",
        "monitoring_norm_insertion",
    ] {
        assert!(header.contains(&col), "{header:?}");
    }
    let plans = std::fs::read_to_string(dir.path().join("rep/plans.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(plans.as_bytes());
    let heads = rdr.headers().unwrap().clone();
    let e = heads.iter().position(|h| h == "energy_norm").unwrap();
    let n_uavs = serde_json::from_str::<ScenarioFile>(&std::fs::read_to_string(scen).unwrap())
        .unwrap()
        .scenario
        .n_uavs() as f64;
    for rec in rdr.records() {
        let v: f64 = rec.unwrap()[e].parse().unwrap();
        assert!((0.0..=n_uavs).contains(&v));
    }
}

#[test]
fn sweep_counts_grid_points() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "small", 3, 1);
    let o = run(
        dir.path(),
        &["sweep", files[0].to_str().unwrap(), "--step", "0.5", "--algo", "greedy", "--out", "sw.csv"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("sw.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);
    assert_eq!(text.lines().filter(|l| l.ends_with(",true")).count(), 1);
    let o = run(dir.path(), &["sweep", files[0].to_str().unwrap(), "--step", "0.3", "--out", "x.csv"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn empty_bench_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["bench", "--sizes", "", "--out", "b.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn bound_requires_full_windows_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate(dir.path(), "small", 3, 1);
    let scen = files[0].to_str().unwrap();
    assert_eq!(code(&run(dir.path(), &["bound", scen, "--out", "b.csv"])), 1);
    let o = run(dir.path(), &["bound", scen, "--force-proxy", "--out", "b.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rec = rdr.records().next().unwrap().unwrap();
    let upper: f64 = rec[1].parse().unwrap();
    let lower: f64 = rec[2].parse().unwrap();
    assert!(lower <= upper);
}

#[test]
fn export_writes_mps_sections() {
    let dir = tempfile::tempdir().unwrap();
    let s = line3();
    let hash = scenario_hash(&s);
    write_scenario(&dir.path().join("l.json"), &ScenarioFile::new(s)).unwrap();
    let o = run(dir.path(), &["export-mps", "l.json", "--out", "l.mps"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("l.mps")).unwrap();
    for section in ["NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"] {
        assert!(text.lines().any(|l| l.starts_with(section)), "{section}");
    }
    let m = std::fs::read_to_string(dir.path().join("l.manifest.json")).unwrap();
    assert!(m.contains(&hash));
}
