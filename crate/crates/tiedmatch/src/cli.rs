//! Command-line interface. Results go to stdout as JSON unless a command
//! writes a file. Exit status: 0 success, 1 a checked property failed,
//! 2 an error.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tiedmatch_core::bandit::{BanditConfig, BanditEnv, OracleInput, OracleKind, T0Policy};
use tiedmatch_core::engine::{default_m, eps_oracle, pareto_fill};
use tiedmatch_core::error::Error as CoreError;
use tiedmatch_core::gen::{GeneratorSpec, RandomSpec, RANDOM_ALGORITHM};
use tiedmatch_core::scalar::{format_rational, parse_rational};
use tiedmatch_core::share::{alpha_star, oss, oss_ratio, MatchingClass};
use tiedmatch_core::stability::{blocking_pairs, enumerate_matchings, enumerate_stable_matchings, internal_blocking_pairs, BlockingKind, EnumBound};
use tiedmatch_core::{MarketInstance, Matching, MatchingDistribution, Rational, Scalar};

use crate::experiments::{run_experiment, Experiment, Manifest, TOOL, VERSION};
use crate::io::{self, distribution_to_value, matching_to_value, serialize_instance, to_pretty};
use crate::report::{exact, exact_list, ratio_value, run_seeds};

#[derive(Debug, Parser)]
#[command(name = "tiedmatch", version, about = "Stable matching with one-sided ties")]
pub struct Cli {
    /// Exact rational arithmetic (default).
    #[arg(long, global = true, conflicts_with = "float")]
    pub exact: bool,
    /// Floating-point arithmetic where the algorithm allows it.
    #[arg(long, global = true)]
    pub float: bool,
    /// Base seed for random generation and simulation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest side length accepted by exhaustive enumeration [default: 8].
    #[arg(long, global = true)]
    pub enum_bound: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance.
    Gen(GenArgs),
    /// Check an instance file against the format invariants.
    Validate { instance: PathBuf },
    /// List the blocking pairs of a matching.
    Check {
        instance: PathBuf,
        matching: PathBuf,
        #[arg(long, default_value = "0")]
        eps: String,
        /// Only pairs where both sides are matched.
        #[arg(long)]
        internal: bool,
    },
    /// List all matchings, or the (ε-)stable ones.
    Enumerate {
        instance: PathBuf,
        #[arg(long)]
        stable: bool,
        /// Implies --stable.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Optimal (ε-)stable share of every worker.
    Oss {
        instance: PathBuf,
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// Best worst-case fraction of OSS reachable within a matching class.
    Ratio {
        instance: PathBuf,
        #[arg(long, value_enum)]
        class: ClassArg,
        /// With class s, use ε-stable matchings.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Per-worker approximation factors compatible with the class-M floor.
    AlphaStar { instance: PathBuf },
    /// Run the duplication oracle.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value = "0")]
        eps: String,
        #[arg(long)]
        pareto_fill: bool,
        /// Write the distribution here in the canonical format.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate ETCO over several seeds and write the regret CSV.
    Bandit(BanditArgs),
    /// Run a named reproduction experiment.
    Experiment {
        #[arg(value_enum, required_unless_present = "manifest")]
        name: Option<Experiment>,
        /// JSON manifest; its params override the defaults.
        #[arg(long, conflicts_with = "name")]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClassArg {
    M,
    I,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Thm1,
    #[value(name = "recursive_In", alias = "In")]
    RecursiveIn,
    Example1,
    Example2,
    #[value(name = "appendixH_nu", alias = "nu")]
    AppendixHNu,
    #[value(name = "appendixH_nuprime", alias = "nuprime")]
    AppendixHNuPrime,
    Random,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Level of the recursive instance.
    #[arg(long)]
    pub n: Option<u32>,
    /// Number of workers (thm1, random).
    #[arg(long = "N")]
    pub n_workers: Option<usize>,
    /// Number of jobs (random).
    #[arg(long = "K")]
    pub n_jobs: Option<usize>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long, default_value_t = 0.3)]
    pub tie_prob: f64,
    #[arg(long, default_value_t = 4)]
    pub grid: u32,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum T0Arg {
    TwoThirds,
    HalfLog,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleInputArg {
    Ucb,
    Center,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleKindArg {
    Ism,
    Eps,
}

#[derive(Debug, Args)]
pub struct BanditArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long = "T")]
    pub horizon: u64,
    #[arg(long = "T0", conflicts_with = "t0_policy")]
    pub t0: Option<u64>,
    #[arg(long = "T0-policy", value_enum, default_value = "two-thirds")]
    pub t0_policy: T0Arg,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value = "eps")]
    pub oracle: OracleKindArg,
    #[arg(long, value_enum, default_value = "ucb")]
    pub oracle_input: OracleInputArg,
    #[arg(long)]
    pub no_pareto_fill: bool,
    /// `star` for α* from the max-min LP, or one factor for every worker.
    #[arg(long, default_value = "star")]
    pub alpha: String,
    #[arg(long)]
    pub out: PathBuf,
}

/// Process exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    PropertyFailed,
}

#[derive(Clone, Copy)]
struct Ctx {
    float: bool,
    seed: Option<u64>,
    enum_bound: Option<usize>,
    bound: EnumBound,
}

pub fn run(cli: Cli) -> Result<Status> {
    let bound = cli.enum_bound.map(EnumBound::new).unwrap_or_default();
    let ctx = Ctx { float: cli.float, seed: cli.seed, enum_bound: cli.enum_bound, bound };
    match cli.command {
        Command::Gen(args) => gen_cmd(&args, ctx),
        Command::Validate { instance } => validate(&instance),
        Command::Check { instance, matching, eps, internal } => check(&instance, &matching, &eps, internal, ctx),
        Command::Enumerate { instance, stable, eps } => enumerate(&instance, stable, eps.as_deref(), ctx),
        Command::Oss { instance, eps } => oss_cmd(&instance, &eps, ctx),
        Command::Ratio { instance, class, eps } => ratio_cmd(&instance, class, eps.as_deref(), ctx),
        Command::AlphaStar { instance } => alpha_cmd(&instance, ctx),
        Command::Oracle { instance, m, eps, pareto_fill, output } => {
            oracle_cmd(&instance, m, &eps, pareto_fill, output.as_deref(), ctx)
        }
        Command::Bandit(args) => bandit_cmd(&args, ctx),
        Command::Experiment { name, manifest, out } => experiment_cmd(name, manifest.as_deref(), out, ctx),
    }
}

fn print(value: &Value) {
    print!("{}", to_pretty(value));
}

fn load(path: &Path) -> Result<MarketInstance> {
    let file = io::load_instance(path)?;
    let violations = file.instance.validate();
    if let Some(v) = violations.first() {
        bail!("{}: invalid instance: {v}", path.display());
    }
    Ok(file.instance)
}

fn eps_arg(text: &str) -> Result<Rational> {
    let eps = parse_rational(text).with_context(|| format!("malformed epsilon {text:?}"))?;
    if eps < Rational::from_count(0) {
        return Err(CoreError::NegativeEpsilon.into());
    }
    Ok(eps)
}

/// Exact values as `{"exact", "decimal"}` objects, or bare floats with `--float`.
fn num(r: &Rational, ctx: Ctx) -> Value {
    if ctx.float {
        json!(r.to_f64())
    } else {
        exact(r)
    }
}

fn nums(xs: &[Rational], ctx: Ctx) -> Value {
    if ctx.float {
        json!(xs.iter().map(Scalar::to_f64).collect::<Vec<_>>())
    } else {
        exact_list(xs)
    }
}

fn gen_cmd(args: &GenArgs, ctx: Ctx) -> Result<Status> {
    let need = |v: Option<usize>, flag: &str| v.with_context(|| format!("--family {:?} requires {flag}", args.family));
    let (spec, params) = match args.family {
        Family::Thm1 => {
            let n = need(args.n_workers, "--N")?;
            (GeneratorSpec::Thm1 { n_workers: n }, json!({ "N": n }))
        }
        Family::RecursiveIn => {
            let n = args.n.context("--family recursive_In requires --n")?;
            (GeneratorSpec::RecursiveIn { n }, json!({ "n": n }))
        }
        Family::Example1 => (GeneratorSpec::Example1, json!({})),
        Family::Example2 => (GeneratorSpec::Example2, json!({})),
        Family::AppendixHNu => (GeneratorSpec::AppendixHNu, json!({})),
        Family::AppendixHNuPrime => {
            let text = args.gamma.as_deref().context("--family appendixH_nuprime requires --gamma")?;
            let gamma = parse_rational(text).with_context(|| format!("malformed gamma {text:?}"))?;
            let params = json!({ "gamma": format_rational(&gamma) });
            (GeneratorSpec::AppendixHNuPrime { gamma }, params)
        }
        Family::Random => {
            let spec = RandomSpec {
                n_workers: need(args.n_workers, "--N")?,
                n_jobs: need(args.n_jobs, "--K")?,
                seed: ctx.seed.unwrap_or(0),
                tie_prob: args.tie_prob,
                grid: args.grid,
            };
            let params = json!({
                "N": spec.n_workers, "K": spec.n_jobs, "seed": spec.seed,
                "tie_prob": spec.tie_prob, "grid": spec.grid,
            });
            (GeneratorSpec::Random(spec), params)
        }
    };
    let inst = spec.generate()?;
    let family = args.family.to_possible_value().expect("no skipped variants").get_name().to_string();
    let meta = json!({
        "generator": { "family": family, "params": params },
        "rng": RANDOM_ALGORITHM,
        "tool": TOOL,
        "version": VERSION,
    });
    let text = serialize_instance(&inst, Some(&meta));
    match &args.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(Status::Ok)
}

fn validate(path: &Path) -> Result<Status> {
    let file = io::load_instance(path)?;
    let violations: Vec<String> = file.instance.validate().iter().map(ToString::to_string).collect();
    print(&json!({ "valid": violations.is_empty(), "violations": violations }));
    Ok(if violations.is_empty() { Status::Ok } else { Status::PropertyFailed })
}

fn check(path: &Path, matching: &Path, eps: &str, internal: bool, ctx: Ctx) -> Result<Status> {
    let inst = load(path)?;
    let mu = io::load_matching(matching, inst.n_workers(), inst.n_jobs())?;
    let eps = eps_arg(eps)?;
    let report = match (internal, ctx.float) {
        (true, false) => internal_blocking_pairs(&inst, &mu)?.pairs,
        (true, true) => internal_blocking_pairs(&inst.to_f64(), &mu)?.pairs,
        (false, false) => blocking_pairs(&inst, &mu, &eps)?.pairs,
        (false, true) => blocking_pairs(&inst.to_f64(), &mu, &eps.to_f64())?.pairs,
    };
    let pairs: Vec<Value> = report
        .iter()
        .map(|b| {
            let kind = match b.kind {
                BlockingKind::Weak => "weak",
                BlockingKind::Internal => "internal",
                BlockingKind::Epsilon => "epsilon",
            };
            json!({ "worker": b.worker + 1, "job": b.job + 1, "kind": kind })
        })
        .collect();
    print(&json!({
        "matching": matching_to_value(&mu),
        "eps": num(&eps, ctx),
        "internal": internal,
        "stable": pairs.is_empty(),
        "blocking_pairs": pairs,
    }));
    Ok(if pairs.is_empty() { Status::Ok } else { Status::PropertyFailed })
}

fn enumerate(path: &Path, stable: bool, eps: Option<&str>, ctx: Ctx) -> Result<Status> {
    let inst = load(path)?;
    let list: Vec<Matching> = match eps {
        Some(text) => {
            let eps = eps_arg(text)?;
            if ctx.float {
                enumerate_stable_matchings(&inst.to_f64(), &eps.to_f64(), ctx.bound)?
            } else {
                enumerate_stable_matchings(&inst, &eps, ctx.bound)?
            }
        }
        None if stable => enumerate_stable_matchings(&inst, &Rational::from_count(0), ctx.bound)?,
        None => enumerate_matchings(&inst, ctx.bound)?.collect(),
    };
    let values: Vec<Value> = list.iter().map(matching_to_value).collect();
    print(&json!({ "count": values.len(), "matchings": values }));
    Ok(Status::Ok)
}

fn oss_cmd(path: &Path, eps: &str, ctx: Ctx) -> Result<Status> {
    let inst = load(path)?;
    let eps = eps_arg(eps)?;
    let shares = if ctx.float {
        json!(oss(&inst.to_f64(), &eps.to_f64(), ctx.bound)?)
    } else {
        exact_list(&oss(&inst, &eps, ctx.bound)?)
    };
    print(&json!({ "eps": num(&eps, ctx), "oss": shares }));
    Ok(Status::Ok)
}

fn ratio_cmd(path: &Path, class: ClassArg, eps: Option<&str>, ctx: Ctx) -> Result<Status> {
    let inst = load(path)?;
    let class = match (class, eps) {
        (ClassArg::M, None) => MatchingClass::All,
        (ClassArg::I, None) => MatchingClass::InternallyStable,
        (ClassArg::S, None) => MatchingClass::Stable,
        (ClassArg::S, Some(text)) => MatchingClass::EpsStable(eps_arg(text)?),
        (_, Some(_)) => bail!("--eps only applies to --class s"),
    };
    let r = oss_ratio(&inst, &class, ctx.bound)?;
    let ratio = if ctx.float {
        match &r.ratio {
            tiedmatch_core::share::RatioValue::Finite(x) => json!(x.to_f64()),
            tiedmatch_core::share::RatioValue::Infinite => json!("inf"),
        }
    } else {
        ratio_value(&r.ratio)
    };
    print(&json!({
        "class": class.to_string(),
        "oss": nums(&r.weights, ctx),
        "ratio": ratio,
        "t": num(&r.t, ctx),
        "utilities": nums(&r.utilities, ctx),
        "witness": distribution_to_value(&r.witness),
    }));
    Ok(Status::Ok)
}

fn alpha_cmd(path: &Path, ctx: Ctx) -> Result<Status> {
    let inst = load(path)?;
    let a = alpha_star(&inst, ctx.bound)?;
    print(&json!({
        "oss": nums(&a.oss, ctx),
        "r_m": ratio_value(&a.floor.ratio),
        "alpha": nums(&a.alpha, ctx),
        "benchmark": nums(&a.benchmark, ctx),
        "floor_witness": distribution_to_value(&a.floor.witness),
    }));
    Ok(Status::Ok)
}

fn oracle_cmd(
    path: &Path,
    m: Option<usize>,
    eps: &str,
    fill: bool,
    output: Option<&Path>,
    ctx: Ctx,
) -> Result<Status> {
    let inst = load(path)?;
    let m = m.unwrap_or_else(|| default_m(inst.n_workers()));
    let eps = eps_arg(eps)?;
    let mut dist: MatchingDistribution =
        if ctx.float { eps_oracle(&inst.to_f64(), m, &eps.to_f64())? } else { eps_oracle(&inst, m, &eps)? };
    if fill {
        dist = pareto_fill(&inst, &dist)?;
    }
    let utilities = dist.expected_utilities(&inst)?;
    // shares need enumeration; large markets get the distribution only
    let shares = match oss(&inst, &eps, ctx.bound) {
        Ok(s) => Some(s),
        Err(CoreError::EnumerationBound { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let m_q = Rational::from_count(m);
    let workers: Vec<Value> = (0..inst.n_workers())
        .map(|w| {
            let mut row = json!({ "worker": w + 1, "utility": num(&utilities[w], ctx) });
            if let Some(shares) = &shares {
                let floor = &shares[w] / &m_q - &eps;
                row["oss"] = num(&shares[w], ctx);
                row["guarantee"] = num(&floor, ctx);
                row["margin"] = num(&(&utilities[w] - &floor), ctx);
            }
            row
        })
        .collect();
    if let Some(out) = output {
        fs::write(out, to_pretty(&distribution_to_value(&dist))).with_context(|| format!("writing {}", out.display()))?;
    }
    print(&json!({
        "m": m,
        "eps": num(&eps, ctx),
        "pareto_fill": fill,
        "distribution": distribution_to_value(&dist),
        "workers": workers,
    }));
    Ok(Status::Ok)
}

fn bandit_cmd(args: &BanditArgs, ctx: Ctx) -> Result<Status> {
    let inst = load(&args.instance)?;
    let env = BanditEnv::new(&inst, ctx.bound)?;
    let t0 = match (args.t0, args.t0_policy) {
        (Some(t0), _) => T0Policy::Explicit(t0),
        (None, T0Arg::TwoThirds) => T0Policy::TwoThirds,
        (None, T0Arg::HalfLog) => T0Policy::HalfLog,
    };
    if args.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let mut cfg = BanditConfig::new(args.horizon, t0, ctx.seed.unwrap_or(0));
    cfg.sigma = args.sigma;
    cfg.m = args.m;
    cfg.oracle = match args.oracle {
        OracleKindArg::Ism => OracleKind::Ism,
        OracleKindArg::Eps => OracleKind::Eps,
    };
    cfg.oracle_input = match args.oracle_input {
        OracleInputArg::Ucb => OracleInput::Ucb,
        OracleInputArg::Center => OracleInput::Center,
    };
    cfg.pareto_fill = !args.no_pareto_fill;
    let alpha: Vec<f64> = if args.alpha == "star" {
        // α* is defined on the unpadded market; padding jobs change nothing
        alpha_star(&inst, ctx.bound)?.alpha.iter().map(Scalar::to_f64).collect()
    } else {
        let a = parse_rational(&args.alpha).with_context(|| format!("malformed --alpha {:?}", args.alpha))?;
        vec![a.to_f64(); inst.n_workers()]
    };
    let traces = run_seeds(&env, &cfg, args.seeds)?;
    crate::experiments::write_regret_file(&args.out, &traces, &alpha)?;
    let gs = traces.iter().filter(|t| t.oracle == tiedmatch_core::bandit::OracleChoice::GaleShapley).count();
    print(&json!({
        "horizon": args.horizon,
        "t0": traces[0].t0,
        "seeds": args.seeds,
        "base_seed": cfg.seed,
        "sigma": args.sigma,
        "alpha": alpha,
        "frac_runs_gs_oracle": gs as f64 / traces.len() as f64,
        "out": args.out.display().to_string(),
    }));
    Ok(Status::Ok)
}

fn experiment_cmd(name: Option<Experiment>, manifest: Option<&Path>, out: Option<PathBuf>, ctx: Ctx) -> Result<Status> {
    let mut manifest = match (name, manifest) {
        (_, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<Manifest>(&text).with_context(|| format!("parsing manifest {}", path.display()))?
        }
        (Some(name), None) => Manifest::new(name),
        (None, None) => bail!("name an experiment or pass --manifest"),
    };
    if let Some(seed) = ctx.seed {
        manifest.params.seed = seed;
    }
    if let Some(bound) = ctx.enum_bound {
        manifest.params.enum_bound = bound;
    }
    let dir = out
        .or_else(|| manifest.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(format!("results/{}", experiment_slug(manifest.experiment))));
    let summary = run_experiment(&manifest, &dir)?;
    for c in &summary.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("summary: {}", dir.join("summary.json").display());
    Ok(if summary.passed { Status::Ok } else { Status::PropertyFailed })
}

fn experiment_slug(e: Experiment) -> String {
    e.to_possible_value().expect("no skipped variants").get_name().to_string()
}
