use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use tiedmatch::io::load_distribution;

fn tiedmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tiedmatch")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let out = tiedmatch(&all);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn example1_round_trip_and_shares() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "ex1.json", &["--family", "example1"]);
    assert_eq!(code(&tiedmatch(&["validate", s(&inst)])), 0);
    let oss = stdout_json(&tiedmatch(&["oss", s(&inst)]));
    let exact: Vec<&str> = oss["oss"].as_array().unwrap().iter().map(|v| v["exact"].as_str().unwrap()).collect();
    assert_eq!(exact, ["1", "1", "1"]);
    let float = stdout_json(&tiedmatch(&["--float", "oss", s(&inst)]));
    assert_eq!(float["oss"], serde_json::json!([1.0, 1.0, 1.0]));
    let stable = stdout_json(&tiedmatch(&["enumerate", "--stable", s(&inst)]));
    assert_eq!(stable["count"], 2);
    let all = stdout_json(&tiedmatch(&["enumerate", s(&inst)]));
    assert_eq!(all["count"], 8);
    let ratio = stdout_json(&tiedmatch(&["ratio", s(&inst), "--class", "m"]));
    assert_eq!(ratio["ratio"]["exact"], "3/2");
}

#[test]
fn check_reports_blocking_pairs_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "ex1.json", &["--family", "example1"]);
    let mu = dir.path().join("mu.json");
    fs::write(&mu, r#"{"pairs": [[2, 1], [3, 2]]}"#).unwrap();
    let out = tiedmatch(&["check", s(&inst), s(&mu)]);
    assert_eq!(code(&out), 1);
    let report = stdout_json(&out);
    let pairs: Vec<(u64, u64)> = report["blocking_pairs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["worker"].as_u64().unwrap(), p["job"].as_u64().unwrap()))
        .collect();
    assert_eq!(pairs, [(1, 1), (1, 2)]);
    let internal = tiedmatch(&["check", s(&inst), s(&mu), "--internal"]);
    assert_eq!(code(&internal), 0);
}

#[test]
fn invalid_files_are_reported() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"n_workers": 1, "n_jobs": 1, "utility": [["3/2"]], "job_prefs": [[1]]}"#).unwrap();
    let out = tiedmatch(&["validate", s(&bad)]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["valid"], false);
    assert_eq!(code(&tiedmatch(&["oss", s(&bad)])), 2);

    let broken = dir.path().join("broken.json");
    fs::write(&broken, r#"{"n_workers": 1, "n_jobs": 1, "utility": [["x"]], "job_prefs": [[1]]}"#).unwrap();
    let out = tiedmatch(&["validate", s(&broken)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("utility[0][0]"));
}

#[test]
fn generator_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = tiedmatch(&["gen", "--family", "thm1", "--N", "3", "-o", s(&dir.path().join("x.json"))]);
    assert_eq!(code(&out), 2);
    let out = tiedmatch(&["gen", "--family", "appendixH_nuprime", "--gamma", "0.3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn random_generation_is_reproducible_and_tagged() {
    let dir = TempDir::new().unwrap();
    let args = ["--family", "random", "--N", "3", "--K", "4", "--seed", "11"];
    let a = gen(&dir, "a.json", &args);
    let b = gen(&dir, "b.json", &args);
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["meta"]["rng"], "chacha8-v1");
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["meta"]["generator"]["params"]["seed"], 11);
}

#[test]
fn oracle_writes_a_loadable_distribution() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "ex2.json", &["--family", "example2"]);
    let dist_path = dir.path().join("d.json");
    let out = tiedmatch(&["oracle", s(&inst), "--m", "2", "-o", s(&dist_path)]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    for w in report["workers"].as_array().unwrap() {
        assert!(w["margin"]["decimal"].as_f64().unwrap() >= 0.0);
    }
    let dist = load_distribution(&dist_path, 3, 3).unwrap();
    assert_eq!(dist.support().len(), 2);
    assert_eq!(report["distribution"]["support"][0]["prob"], "1/2");
}

#[test]
fn alpha_star_on_nu() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "nu.json", &["--family", "appendixH_nu"]);
    let v = stdout_json(&tiedmatch(&["alpha-star", s(&inst)]));
    let alpha: Vec<&str> = v["alpha"].as_array().unwrap().iter().map(|x| x["exact"].as_str().unwrap()).collect();
    assert_eq!(alpha, ["1", "3/4", "3/4", "3/4"]);
}

#[test]
fn bandit_writes_regret_csv() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "nu.json", &["--family", "nu"]);
    let csv = dir.path().join("trace.csv");
    let out = tiedmatch(&[
        "bandit", "--instance", s(&inst), "--T", "3000", "--T0-policy", "two-thirds", "--sigma", "1", "--seeds", "3",
        "--out", s(&csv),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "checkpoint_t,worker,mean_reg,stderr_reg,mean_reg_alpha,stderr_reg_alpha,frac_runs_gs_oracle"
    );
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("3000,4,"), "{last}");
    let bad = tiedmatch(&["bandit", "--instance", s(&inst), "--T", "3", "--T0", "5", "--out", s(&csv)]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn experiment_summary_mirrors_exit_status() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("thm1");
    let out = tiedmatch(&["experiment", "thm1-ratio", "--out", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let summary: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["config"]["params"]["thm1_sizes"], serde_json::json!([2, 4, 6]));
    assert!(out_dir.join("thm1_ratio.csv").exists());

    let manifest = dir.path().join("m.json");
    fs::write(&manifest, r#"{"experiment": "dsic-sweep", "params": {"misreports": 25, "n_workers": 4}}"#).unwrap();
    let out_dir = dir.path().join("dsic");
    let out = tiedmatch(&["experiment", "--manifest", s(&manifest), "--out", s(&out_dir), "--seed", "9"]);
    assert_eq!(code(&out), 0);
    let summary: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["params"]["seed"], 9);
    assert_eq!(summary["config"]["params"]["misreports"], 25);
}
