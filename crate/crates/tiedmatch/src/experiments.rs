//! Named reproduction experiments. Each writes JSON/CSV artifacts and a
//! `summary.json` whose `passed` field mirrors the process exit status.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tiedmatch_core::bandit::{regret_report, BanditConfig, BanditEnv, OracleChoice, RegretTrace, T0Policy};
use tiedmatch_core::engine::{default_m, ism_oracle};
use tiedmatch_core::gen::{self, RandomSpec};
use tiedmatch_core::scalar::{format_rational, int, parse_rational, ratio};
use tiedmatch_core::share::{alpha_star, oss, oss_ratio, MatchingClass, RatioValue};
use tiedmatch_core::stability::{enumerate_stable_matchings, is_internally_stable, EnumBound};
use tiedmatch_core::{MarketInstance, Rational, Scalar};

use crate::io::{distribution_to_value, matching_to_value, to_pretty};
use crate::report::{exact, exact_list, ratio_value, run_seeds, show, write_csv, write_regret_csv};

pub const TOOL: &str = "tiedmatch";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Experiment {
    #[serde(rename = "thm1-ratio")]
    #[value(name = "thm1-ratio")]
    Thm1Ratio,
    #[serde(rename = "In-ratio")]
    #[value(name = "In-ratio")]
    InRatio,
    #[serde(rename = "oracle-guarantee-sweep")]
    #[value(name = "oracle-guarantee-sweep")]
    OracleGuaranteeSweep,
    #[serde(rename = "dsic-sweep")]
    #[value(name = "dsic-sweep")]
    DsicSweep,
    #[serde(rename = "appendixH-tradeoff")]
    #[value(name = "appendixH-tradeoff")]
    AppendixHTradeoff,
    #[serde(rename = "etco-regimes")]
    #[value(name = "etco-regimes")]
    EtcoRegimes,
}

/// Parameter ranges shared by all experiments; each reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub seed: u64,
    pub enum_bound: usize,
    pub thm1_sizes: Vec<usize>,
    pub in_levels: Vec<u32>,
    /// Largest `n` whose recursive-instance size is checked.
    pub in_size_max: u32,
    pub instances: usize,
    pub misreports: usize,
    pub n_workers: usize,
    pub n_jobs: usize,
    /// Kept as a string so the value stays exact, e.g. `"1/10"`.
    pub gamma: String,
    pub horizons: Vec<u64>,
    pub seeds: u64,
    pub sigma: f64,
    pub regime_horizon: u64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            seed: 0,
            enum_bound: EnumBound::default().max_workers,
            thm1_sizes: vec![2, 4, 6],
            in_levels: vec![1, 2],
            in_size_max: 5,
            instances: 200,
            misreports: 500,
            n_workers: 6,
            n_jobs: 6,
            gamma: "1/10".into(),
            horizons: vec![10_000, 40_000, 160_000],
            seeds: 100,
            sigma: 1.0,
            regime_horizon: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub experiment: Experiment,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl Manifest {
    pub fn new(experiment: Experiment) -> Self {
        Self { experiment, params: Params::default(), out_dir: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: Experiment,
    pub config: Manifest,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub passed: bool,
}

struct Output<'a> {
    dir: &'a Path,
    artifacts: Vec<String>,
    checks: Vec<Check>,
}

impl Output<'_> {
    fn json(&mut self, name: &str, value: &Value) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, to_pretty(value)).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(name.into());
        Ok(())
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(file, rows).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(name.into());
        Ok(())
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }
}

/// Runs one experiment into `out_dir` (created if missing) and writes
/// `summary.json` there. Errors name the step that failed.
pub fn run_experiment(manifest: &Manifest, out_dir: &Path) -> Result<Summary> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut out = Output { dir: out_dir, artifacts: Vec::new(), checks: Vec::new() };
    let p = &manifest.params;
    match manifest.experiment {
        Experiment::Thm1Ratio => thm1_ratio(p, &mut out),
        Experiment::InRatio => in_ratio(p, &mut out),
        Experiment::OracleGuaranteeSweep => oracle_sweep(p, &mut out),
        Experiment::DsicSweep => dsic_sweep(p, &mut out),
        Experiment::AppendixHTradeoff => appendix_h(p, &mut out),
        Experiment::EtcoRegimes => etco_regimes(p, &mut out),
    }?;
    let passed = out.checks.iter().all(|c| c.passed);
    let mut config = manifest.clone();
    config.out_dir = Some(out_dir.to_path_buf());
    let mut artifacts = out.artifacts;
    artifacts.push("summary.json".into());
    let summary = Summary {
        tool: TOOL,
        version: VERSION,
        experiment: manifest.experiment,
        config,
        checks: out.checks,
        artifacts,
        passed,
    };
    let path = out_dir.join("summary.json");
    fs::write(&path, to_pretty(&serde_json::to_value(&summary)?))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(summary)
}

fn bound(p: &Params) -> EnumBound {
    EnumBound::new(p.enum_bound)
}

/// Random market of exactly `n_workers × n_jobs` whose tie probability and
/// grid are drawn from `seed`.
pub fn sweep_spec(seed: u64, n_workers: usize, n_jobs: usize) -> RandomSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tie_prob = [0.0, 0.25, 0.5, 0.75][rng.random_range(0..4)];
    let grid = rng.random_range(2..=8);
    RandomSpec { n_workers, n_jobs, seed, tie_prob, grid }
}

/// Like [`sweep_spec`] with dimensions drawn from `1..=max_workers` and
/// `1..=max_jobs`.
pub fn sweep_spec_up_to(seed: u64, max_workers: usize, max_jobs: usize) -> RandomSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d1a5);
    let n_workers = rng.random_range(1..=max_workers);
    let n_jobs = rng.random_range(1..=max_jobs);
    sweep_spec(seed, n_workers, n_jobs)
}

/// A single worker's false report: one worker index and a utility row on the
/// grid `{0, 1/6, …, 1}`.
pub fn misreport(seed: u64, inst: &MarketInstance) -> (usize, Vec<Rational>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11a2_0fee);
    let worker = rng.random_range(0..inst.n_workers());
    let row = (0..inst.n_jobs()).map(|_| ratio(rng.random_range(0..=6), 6)).collect();
    (worker, row)
}

/// Two workers, two jobs, distinct utilities per row with minimum gap 1/2:
/// U = [[1, 1/2], [1/2, 1]].
pub fn tie_free_comparison() -> MarketInstance {
    gen::random(&RandomSpec { n_workers: 2, n_jobs: 2, seed: 17, tie_prob: 0.0, grid: 2 })
        .expect("fixed spec is valid")
}

fn ratio_eq(r: &RatioValue, target: &Rational) -> bool {
    matches!(r, RatioValue::Finite(x) if x == target)
}

fn thm1_ratio(p: &Params, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        n_workers: usize,
        n_jobs: usize,
        r_s: String,
        r_s_decimal: f64,
        r_m: String,
        r_m_decimal: f64,
    }
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for &n in &p.thm1_sizes {
        let inst = gen::thm1(n).with_context(|| format!("generating thm1({n})"))?;
        let rs = oss_ratio(&inst, &MatchingClass::Stable, bound(p)).with_context(|| format!("R_S of thm1({n})"))?;
        let rm = oss_ratio(&inst, &MatchingClass::All, bound(p)).with_context(|| format!("R_M of thm1({n})"))?;
        let half = ratio(n as i64, 2);
        out.check(format!("R_S(thm1({n})) = {n}/2"), ratio_eq(&rs.ratio, &half), format!("R_S = {}", rs.ratio));
        let dec = |r: &RatioValue| match r {
            RatioValue::Finite(x) => x.to_f64(),
            RatioValue::Infinite => f64::INFINITY,
        };
        rows.push(Row {
            n_workers: n,
            n_jobs: inst.n_jobs(),
            r_s: rs.ratio.to_string(),
            r_s_decimal: dec(&rs.ratio),
            r_m: rm.ratio.to_string(),
            r_m_decimal: dec(&rm.ratio),
        });
        details.push(json!({
            "n_workers": n,
            "r_s": ratio_value(&rs.ratio),
            "r_s_witness": distribution_to_value(&rs.witness),
            "r_m": ratio_value(&rm.ratio),
            "r_m_witness": distribution_to_value(&rm.witness),
        }));
    }
    out.csv("thm1_ratio.csv", rows)?;
    out.json("thm1_ratio.json", &Value::Array(details))
}

fn in_ratio(p: &Params, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Size {
        n: u32,
        n_workers: usize,
        n_jobs: usize,
        expected_workers: usize,
        expected_jobs: usize,
    }
    let mut sizes = Vec::new();
    for n in 0..=p.in_size_max {
        let inst = gen::recursive_in(n).with_context(|| format!("generating I_{n}"))?;
        let expected_jobs = 1usize << n;
        let expected_workers = ((n as usize + 2) << n) / 2;
        out.check(
            format!("I_{n} has {expected_workers} workers and {expected_jobs} jobs"),
            inst.n_workers() == expected_workers && inst.n_jobs() == expected_jobs,
            format!("{} x {}", inst.n_workers(), inst.n_jobs()),
        );
        sizes.push(Size { n, n_workers: inst.n_workers(), n_jobs: inst.n_jobs(), expected_workers, expected_jobs });
    }
    out.csv("in_sizes.csv", sizes)?;
    let mut details = Vec::new();
    for &n in &p.in_levels {
        let inst = gen::recursive_in(n).with_context(|| format!("generating I_{n}"))?;
        let shares = oss(&inst, &int(0), bound(p)).with_context(|| format!("OSS of I_{n}"))?;
        out.check(format!("OSS(I_{n}) is all ones"), shares.iter().all(|s| *s == int(1)), show(&shares));
        let rm = oss_ratio(&inst, &MatchingClass::All, bound(p)).with_context(|| format!("R_M of I_{n}"))?;
        let floor = ratio(n as i64 + 2, 2);
        let ok = match &rm.ratio {
            RatioValue::Finite(x) => *x >= floor,
            RatioValue::Infinite => true,
        };
        out.check(format!("R_M(I_{n}) >= {}", format_rational(&floor)), ok, format!("R_M = {}", rm.ratio));
        details.push(json!({ "n": n, "oss": exact_list(&shares), "r_m": ratio_value(&rm.ratio) }));
    }
    out.json("in_ratio.json", &Value::Array(details))
}

fn oracle_sweep(p: &Params, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        index: usize,
        seed: u64,
        m: usize,
        internally_stable: bool,
        min_margin: f64,
        violations: usize,
    }
    let rows: Vec<Row> = (0..p.instances)
        .into_par_iter()
        .map(|i| -> Result<Row> {
            let seed = p.seed.wrapping_add(i as u64);
            let inst = gen::random(&sweep_spec(seed, p.n_workers, p.n_jobs))?;
            let m = default_m(inst.n_workers());
            let dist = ism_oracle(&inst, m)?;
            let shares = oss(&inst, &int(0), bound(p)).with_context(|| format!("OSS of sweep instance {i}"))?;
            let mut internally_stable = true;
            for (mu, _) in dist.support() {
                internally_stable &= is_internally_stable(&inst, mu)?;
            }
            let utilities = dist.expected_utilities(&inst)?;
            let margins: Vec<Rational> =
                utilities.iter().zip(&shares).map(|(u, s)| int(m as i64) * u - s).collect();
            let violations = margins.iter().filter(|x| **x < int(0)).count();
            let min_margin = margins.iter().map(Scalar::to_f64).fold(f64::INFINITY, f64::min);
            Ok(Row { index: i, seed, m, internally_stable, min_margin, violations })
        })
        .collect::<Result<_>>()
        .context("oracle guarantee sweep")?;
    let bad = rows.iter().filter(|r| r.violations > 0 || !r.internally_stable).count();
    out.check(
        format!("m * U_D(w) >= OSS(w) with internally stable support on {} instances", rows.len()),
        bad == 0,
        format!("{bad} instances violate"),
    );
    out.csv("oracle_guarantee.csv", rows)
}

fn dsic_sweep(p: &Params, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        index: usize,
        seed: u64,
        worker: usize,
        truthful: String,
        misreport: String,
        ok: bool,
    }
    let rows: Vec<Row> = (0..p.misreports)
        .into_par_iter()
        .map(|i| -> Result<Row> {
            let seed = p.seed.wrapping_add(i as u64);
            let inst = gen::random(&sweep_spec(seed, p.n_workers, p.n_jobs))?;
            let (w, row) = misreport(seed, &inst);
            let lie = inst.with_worker_row(w, row)?;
            let m = default_m(inst.n_workers());
            let truthful = ism_oracle(&inst, m)?.expected_utility(&inst, w)?;
            let gamed = ism_oracle(&lie, m)?.expected_utility(&inst, w)?;
            Ok(Row {
                index: i,
                seed,
                worker: w + 1,
                ok: truthful >= gamed,
                truthful: format_rational(&truthful),
                misreport: format_rational(&gamed),
            })
        })
        .collect::<Result<_>>()
        .context("misreport sweep")?;
    let bad = rows.iter().filter(|r| !r.ok).count();
    out.check(
        format!("truthful report is weakly best on {} misreports", rows.len()),
        bad == 0,
        format!("{bad} profitable misreports"),
    );
    out.csv("dsic.csv", rows)
}

/// Seed-averaged `Reg^α(T) / T` for each worker.
fn normalized_alpha_regret(traces: &[RegretTrace], alpha: &[f64]) -> Result<Vec<f64>> {
    let rows = regret_report(traces, alpha)?;
    let horizon = traces[0].horizon;
    Ok(rows.iter().filter(|r| r.checkpoint_t == horizon).map(|r| r.mean_reg_alpha / horizon as f64).collect())
}

fn appendix_h(p: &Params, out: &mut Output) -> Result<()> {
    let gamma = parse_rational(&p.gamma).with_context(|| format!("malformed gamma {:?}", p.gamma))?;
    let nu = gen::appendix_h_nu();
    let nu_prime = gen::appendix_h_nu_prime(gamma.clone()).context("generating nu'")?;
    let oss_nu = oss(&nu, &int(0), bound(p)).context("OSS of nu")?;
    let oss_prime = oss(&nu_prime, &int(0), bound(p)).context("OSS of nu'")?;
    let stable_prime = enumerate_stable_matchings(&nu_prime, &int(0), bound(p)).context("stable matchings of nu'")?;
    let star = alpha_star(&nu, bound(p)).context("alpha* of nu")?;
    let half = ratio(1, 2);
    out.check("OSS(nu) = (1/2, 1/2, 1/2, 1/2)", oss_nu.iter().all(|s| *s == half), show(&oss_nu));
    let expected_prime = vec![&half + &gamma, half.clone(), ratio(1, 4), int(0)];
    out.check(
        "OSS(nu') = (1/2 + gamma, 1/2, 1/4, 0)",
        oss_prime == expected_prime,
        show(&oss_prime),
    );
    let expected_bench = vec![half.clone(), ratio(3, 8), ratio(3, 8), ratio(3, 8)];
    out.check(
        "max-min utilities on nu = (1/2, 3/8, 3/8, 3/8)",
        star.floor.utilities == expected_bench,
        show(&star.floor.utilities),
    );
    out.json(
        "benchmarks.json",
        &json!({
            "gamma": exact(&gamma),
            "oss_nu": exact_list(&oss_nu),
            "oss_nu_prime": exact_list(&oss_prime),
            "stable_nu_prime": stable_prime.iter().map(matching_to_value).collect::<Vec<_>>(),
            "r_m_nu": ratio_value(&star.floor.ratio),
            "maxmin_utilities_nu": exact_list(&star.floor.utilities),
            "maxmin_witness_nu": distribution_to_value(&star.floor.witness),
            "alpha_star_nu": exact_list(&star.alpha),
            "benchmark_nu": exact_list(&star.benchmark),
        }),
    )?;

    let env = BanditEnv::new(&nu, bound(p)).context("bandit environment for nu")?;
    let alpha: Vec<f64> = star.alpha.iter().map(Scalar::to_f64).collect();
    #[derive(Serialize)]
    struct Row {
        horizon: u64,
        checkpoint_t: u64,
        worker: usize,
        mean_reg: f64,
        stderr_reg: f64,
        mean_reg_alpha: f64,
        stderr_reg_alpha: f64,
        frac_runs_gs_oracle: f64,
    }
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for &horizon in &p.horizons {
        let mut cfg = BanditConfig::new(horizon, T0Policy::TwoThirds, p.seed);
        cfg.sigma = p.sigma;
        let traces = run_seeds(&env, &cfg, p.seeds).with_context(|| format!("ETCO on nu at T = {horizon}"))?;
        for r in regret_report(&traces, &alpha)? {
            rows.push(Row {
                horizon,
                checkpoint_t: r.checkpoint_t,
                worker: r.worker + 1,
                mean_reg: r.mean_reg,
                stderr_reg: r.stderr_reg,
                mean_reg_alpha: r.mean_reg_alpha,
                stderr_reg_alpha: r.stderr_reg_alpha,
                frac_runs_gs_oracle: r.frac_runs_gs_oracle,
            });
        }
        curves.push((horizon, normalized_alpha_regret(&traces, &alpha)?));
    }
    for w in 0..nu.n_workers() {
        let values: Vec<f64> = curves.iter().map(|(_, c)| c[w]).collect();
        let decreasing = values.windows(2).all(|x| x[1] < x[0]);
        out.check(
            format!("Reg^alpha*(T)/T strictly decreasing for w{}", w + 1),
            decreasing,
            format!("{values:.4?} at T = {:?}", p.horizons),
        );
    }
    out.csv("nu_regret.csv", rows)
}

fn etco_regimes(p: &Params, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        instance: &'static str,
        horizon: u64,
        seeds: u64,
        frac_gs: f64,
        frac_approximation: f64,
        mean_switch_round: f64,
    }
    let mut rows = Vec::new();
    for (name, inst, want_gs) in [("tie-free", tie_free_comparison(), true), ("nu", gen::appendix_h_nu(), false)] {
        let env = BanditEnv::new(&inst, bound(p)).with_context(|| format!("bandit environment for {name}"))?;
        let mut cfg = BanditConfig::new(p.regime_horizon, T0Policy::HalfLog, p.seed);
        cfg.sigma = p.sigma;
        cfg.checkpoints = Vec::new();
        let traces = run_seeds(&env, &cfg, p.seeds).with_context(|| format!("ETCO on {name}"))?;
        let n = traces.len() as f64;
        let frac_gs = traces.iter().filter(|t| t.oracle == OracleChoice::GaleShapley).count() as f64 / n;
        let mean_switch_round = traces.iter().map(|t| t.switch_round as f64).sum::<f64>() / n;
        if want_gs {
            out.check(format!("GS oracle chosen in >= 95% of runs on {name}"), frac_gs >= 0.95, format!("{frac_gs}"));
        } else {
            out.check(
                format!("approximation oracle chosen in every run on {name}"),
                frac_gs == 0.0,
                format!("{}", 1.0 - frac_gs),
            );
        }
        rows.push(Row {
            instance: name,
            horizon: p.regime_horizon,
            seeds: p.seeds,
            frac_gs,
            frac_approximation: 1.0 - frac_gs,
            mean_switch_round,
        });
    }
    out.csv("etco_regimes.csv", rows)
}

/// Writes regret CSV for a set of traces; used by the `bandit` command.
pub fn write_regret_file(path: &Path, traces: &[RegretTrace], alpha: &[f64]) -> Result<()> {
    let rows = regret_report(traces, alpha)?;
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_regret_csv(file, &rows).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(experiment: Experiment) -> Manifest {
        let mut m = Manifest::new(experiment);
        m.params.instances = 10;
        m.params.misreports = 20;
        m.params.seeds = 4;
        m.params.horizons = vec![2_000, 4_000];
        m.params.regime_horizon = 5_000;
        m.params.in_size_max = 3;
        m.params.thm1_sizes = vec![2, 4];
        m
    }

    #[test]
    fn manifest_defaults_fill_missing_fields() {
        let m: Manifest = serde_json::from_str(r#"{"experiment": "In-ratio", "params": {"seed": 3}}"#).unwrap();
        assert_eq!(m.experiment, Experiment::InRatio);
        assert_eq!(m.params.seed, 3);
        assert_eq!(m.params.instances, 200);
        assert!(serde_json::from_str::<Manifest>(r#"{"experiment": "thm1-ratio", "params": {"sed": 3}}"#).is_err());
    }

    #[test]
    fn tie_free_comparison_has_half_gaps() {
        let inst = tie_free_comparison();
        assert_eq!(inst.utility_rows(), vec![vec![int(1), ratio(1, 2)], vec![ratio(1, 2), int(1)]]);
    }

    #[test]
    fn sweeps_are_deterministic() {
        assert_eq!(sweep_spec(5, 6, 6), sweep_spec(5, 6, 6));
        let spec = sweep_spec_up_to(9, 8, 8);
        assert!((1..=8).contains(&spec.n_workers) && (1..=8).contains(&spec.n_jobs));
        let inst = gen::random(&sweep_spec(5, 6, 6)).unwrap();
        assert_eq!(misreport(5, &inst), misreport(5, &inst));
    }

    #[test]
    fn exact_experiments_pass_and_write_summary() {
        for e in [Experiment::Thm1Ratio, Experiment::InRatio, Experiment::OracleGuaranteeSweep, Experiment::DsicSweep] {
            let dir = tempfile::tempdir().unwrap();
            let summary = run_experiment(&small(e), dir.path()).unwrap();
            assert!(summary.passed, "{e:?}: {:?}", summary.checks);
            let written: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
            assert_eq!(written["passed"], true);
            assert_eq!(written["version"], VERSION);
            for name in &summary.artifacts {
                assert!(dir.path().join(name).exists(), "{name}");
            }
        }
    }

    #[test]
    fn appendix_h_writes_benchmarks() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run_experiment(&small(Experiment::AppendixHTradeoff), dir.path()).unwrap();
        assert!(summary.checks.iter().take(3).all(|c| c.passed), "{:?}", summary.checks);
        let bench: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("benchmarks.json")).unwrap()).unwrap();
        assert_eq!(bench["maxmin_utilities_nu"][1]["exact"], "3/8");
    }
}
