//! Explore-then-choose-oracle learning in a matching market with unknown
//! worker utilities.
//!
//! Workers first cycle round-robin through all jobs while tracking
//! confidence intervals. If every worker's empirical ranking separates
//! early, the learner commits to deferred acceptance on the learned
//! rankings; otherwise at round `T0` it hands the upper confidence bounds
//! to an approximation oracle and samples one matching per remaining round.

use alloc::vec;
use alloc::vec::Vec;

use libm::{cbrt, log, sqrt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::engine::{default_m, deferred_acceptance, eps_oracle, ism_oracle, pareto_fill};
use crate::error::{Error, Result};
use crate::market::{MarketInstance, Matching, MatchingDistribution, WorkerPrefProfile};
use crate::scalar::{Rational, Scalar};
use crate::share::oss;
use crate::stability::EnumBound;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum T0Policy {
    Explicit(u64),
    /// `T^{2/3} (K ln T)^{1/3}`
    TwoThirds,
    /// `T / (2 ln T)`
    HalfLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// Plain duplication oracle.
    Ism,
    /// Shifted duplication oracle with `ε = 2√(6 ln T / ⌊T0/K⌋)`.
    Eps,
}

/// Matrix handed to the approximation oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleInput {
    Ucb,
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleChoice {
    GaleShapley,
    Approximation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanditConfig {
    pub horizon: u64,
    pub t0: T0Policy,
    pub sigma: f64,
    pub seed: u64,
    /// Number of job copies; defaults to `⌊log2 N⌋ + 2`.
    pub m: Option<usize>,
    pub oracle: OracleKind,
    pub oracle_input: OracleInput,
    pub pareto_fill: bool,
    /// Rounds at which cumulative rewards are recorded. `T` is always added.
    pub checkpoints: Vec<u64>,
    pub record_rounds: bool,
}

impl BanditConfig {
    pub fn new(horizon: u64, t0: T0Policy, seed: u64) -> Self {
        Self {
            horizon,
            t0,
            sigma: 1.0,
            seed,
            m: None,
            oracle: OracleKind::Eps,
            oracle_input: OracleInput::Ucb,
            pareto_fill: true,
            checkpoints: log_checkpoints(horizon),
            record_rounds: false,
        }
    }

    /// Exploration cap floored to whole round-robin cycles over `n_jobs`.
    pub fn resolved_t0(&self, n_jobs: usize) -> Result<u64> {
        let t = self.horizon as f64;
        let k = n_jobs as u64;
        if k == 0 || self.horizon < k {
            return Err(Error::InvalidParameter(alloc::format!(
                "horizon {} shorter than one cycle over {n_jobs} jobs",
                self.horizon
            )));
        }
        let raw = match self.t0 {
            T0Policy::Explicit(t0) => t0,
            T0Policy::TwoThirds => (cbrt(t * t) * cbrt(k as f64 * log(t))) as u64,
            T0Policy::HalfLog => (t / (2.0 * log(t))) as u64,
        };
        let t0 = raw / k * k;
        if t0 == 0 || t0 >= self.horizon {
            return Err(Error::InvalidParameter(alloc::format!(
                "exploration length {t0} (from {raw}) must lie in (0, {})",
                self.horizon
            )));
        }
        Ok(t0)
    }
}

/// Powers of two below `horizon`, then `horizon`.
pub fn log_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..64).map(|j| 1u64 << j).take_while(|&t| t < horizon).collect();
    out.push(horizon);
    out
}

/// True market plus the stable-share benchmark the learner is scored against.
#[derive(Debug, Clone)]
pub struct BanditEnv {
    /// Exact utilities, padded with zero jobs so that `N ≤ K`.
    pub instance: MarketInstance,
    pub means: MarketInstance<f64>,
    pub oss: Vec<f64>,
}

impl BanditEnv {
    pub fn new(inst: &MarketInstance, bound: EnumBound) -> Result<Self> {
        let violations = inst.validate();
        if let Some(v) = violations.first() {
            return Err(Error::Precondition(alloc::format!("invalid instance: {v}")));
        }
        let instance = inst.pad_jobs(inst.n_workers());
        let shares = oss(&instance, &Rational::from_count(0), bound)?;
        Ok(Self { means: instance.to_f64(), oss: shares.iter().map(Scalar::to_f64).collect(), instance })
    }

    pub fn n_workers(&self) -> usize {
        self.instance.n_workers()
    }

    pub fn n_jobs(&self) -> usize {
        self.instance.n_jobs()
    }
}

/// Empirical statistics of the learner.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    pub n_workers: usize,
    pub n_jobs: usize,
    pub sums: Vec<f64>,
    pub counts: Vec<u64>,
    /// Completed round-robin cycles.
    pub cycles: u64,
    pub flags: Vec<bool>,
}

impl LearnerState {
    pub fn new(n_workers: usize, n_jobs: usize) -> Self {
        Self {
            n_workers,
            n_jobs,
            sums: vec![0.0; n_workers * n_jobs],
            counts: vec![0; n_workers * n_jobs],
            cycles: 0,
            flags: vec![false; n_workers],
        }
    }

    pub fn observe(&mut self, worker: usize, job: usize, reward: f64) {
        let i = worker * self.n_jobs + job;
        self.sums[i] += reward;
        self.counts[i] += 1;
    }

    pub fn count(&self, worker: usize, job: usize) -> u64 {
        self.counts[worker * self.n_jobs + job]
    }

    pub fn mean(&self, worker: usize, job: usize) -> f64 {
        let i = worker * self.n_jobs + job;
        if self.counts[i] == 0 {
            0.0
        } else {
            self.sums[i] / self.counts[i] as f64
        }
    }

    pub fn means(&self) -> Vec<Vec<f64>> {
        (0..self.n_workers).map(|w| (0..self.n_jobs).map(|a| self.mean(w, a)).collect()).collect()
    }
}

pub fn half_width(count: u64, horizon: u64) -> f64 {
    sqrt(6.0 * log(horizon as f64) / count.max(1) as f64)
}

/// Upper and lower confidence bounds, row per worker.
pub fn confidence_bounds(state: &LearnerState, horizon: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut ucb = state.means();
    let mut lcb = ucb.clone();
    for w in 0..state.n_workers {
        for a in 0..state.n_jobs {
            let h = half_width(state.count(w, a), horizon);
            ucb[w][a] += h;
            lcb[w][a] -= h;
        }
    }
    (ucb, lcb)
}

/// Smallest of the first `min(N, K − 1)` consecutive gaps in a row sorted
/// decreasingly; infinite when there are none.
pub fn min_gap(row: &[f64], n_workers: usize) -> f64 {
    let mut sorted = row.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let gaps = n_workers.min(sorted.len().saturating_sub(1));
    (0..gaps).map(|j| sorted[j] - sorted[j + 1]).fold(f64::INFINITY, f64::min)
}

/// Flags after the current cycle: a worker's flag is set once its empirical
/// top gaps all exceed `2√(6 ln T / t_m)`, and stays set.
pub fn gap_flags(state: &LearnerState, horizon: u64) -> Vec<bool> {
    let threshold = 2.0 * half_width(state.cycles, horizon);
    let means = state.means();
    (0..state.n_workers)
        .map(|w| state.flags[w] || (state.cycles > 0 && min_gap(&means[w], state.n_workers) > threshold))
        .collect()
}

/// What the learner plays after exploration.
#[derive(Debug, Clone, PartialEq)]
pub enum Exploitation {
    Fixed(Matching),
    Sampled(MatchingDistribution),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub jobs: Vec<Option<usize>>,
    pub rewards: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub horizon: u64,
    pub t0: u64,
    /// Last exploration round.
    pub switch_round: u64,
    pub oracle: OracleChoice,
    pub exploitation: Exploitation,
    /// Epsilon passed to the approximation oracle, if one was used.
    pub oracle_eps: Option<f64>,
    pub oss: Vec<f64>,
    pub checkpoints: Vec<u64>,
    /// `cumulative[c][w]`: reward collected by `w` up to `checkpoints[c]`.
    pub cumulative: Vec<Vec<f64>>,
    pub rounds: Option<Vec<RoundRecord>>,
}

impl RegretTrace {
    pub fn total_reward(&self, worker: usize) -> f64 {
        self.cumulative.last().map_or(0.0, |c| c[worker])
    }

    /// `t · α · OSS(w) − reward up to t` at checkpoint `c`.
    pub fn regret_alpha(&self, c: usize, worker: usize, alpha: f64) -> f64 {
        self.checkpoints[c] as f64 * alpha * self.oss[worker] - self.cumulative[c][worker]
    }

    pub fn regret(&self, c: usize, worker: usize) -> f64 {
        self.regret_alpha(c, worker, 1.0)
    }
}

fn ln_t(horizon: u64) -> f64 {
    log(horizon as f64)
}

/// Epsilon fed to the shifted oracle after `cycles` full exploration cycles.
pub fn oracle_eps(horizon: u64, cycles: u64) -> f64 {
    2.0 * sqrt(6.0 * ln_t(horizon) / cycles.max(1) as f64)
}

fn empirical_gale_shapley(env: &BanditEnv, state: &LearnerState) -> Result<Matching> {
    let n = env.n_workers();
    let lists = state
        .means()
        .into_iter()
        .map(|row| {
            let mut order: Vec<usize> = (0..row.len()).collect();
            order.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
            order.into_iter().take(n).take_while(|&a| row[a] > 0.0).collect()
        })
        .collect();
    let profile = WorkerPrefProfile::from_acceptable_lists(env.n_jobs(), lists)?;
    deferred_acceptance(&profile, env.instance.job_prefs())
}

fn oracle_distribution(env: &BanditEnv, state: &LearnerState, cfg: &BanditConfig) -> Result<(MatchingDistribution, f64)> {
    let rows = match cfg.oracle_input {
        OracleInput::Ucb => confidence_bounds(state, cfg.horizon).0,
        OracleInput::Center => state.means(),
    };
    let estimate = MarketInstance::new(env.n_workers(), env.n_jobs(), rows, env.instance.job_prefs().to_vec())?;
    let m = cfg.m.unwrap_or_else(|| default_m(env.n_workers()));
    let (dist, eps) = match cfg.oracle {
        OracleKind::Ism => (ism_oracle(&estimate, m)?, 0.0),
        OracleKind::Eps => {
            let eps = oracle_eps(cfg.horizon, state.cycles);
            (eps_oracle(&estimate, m, &eps)?, eps)
        }
    };
    let dist = if cfg.pareto_fill { pareto_fill(&estimate, &dist)? } else { dist };
    Ok((dist, eps))
}

fn sample<'a>(support: &'a [(Matching, f64)], rng: &mut ChaCha8Rng) -> &'a Matching {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (mu, p) in support {
        acc += p;
        if u < acc {
            return mu;
        }
    }
    &support[support.len() - 1].0
}

/// Exploitation plan fixed at the end of exploration.
struct Plan {
    oracle: OracleChoice,
    /// Support with float weights for sampling.
    support: Vec<(Matching, f64)>,
    exploitation: Exploitation,
    eps: Option<f64>,
    switch_round: u64,
}

/// Runs the learner for `cfg.horizon` rounds against Gaussian rewards
/// `N(U(w, a), σ²)`; unmatched workers earn 0.
pub fn simulate_etco(env: &BanditEnv, cfg: &BanditConfig) -> Result<RegretTrace> {
    if cfg.sigma.is_nan() || cfg.sigma < 0.0 {
        return Err(Error::InvalidParameter("sigma must be non-negative".into()));
    }
    let (n, k) = (env.n_workers(), env.n_jobs());
    let horizon = cfg.horizon;
    let t0 = cfg.resolved_t0(k)?;
    let mut checkpoints: Vec<u64> = cfg.checkpoints.iter().copied().filter(|&t| t >= 1 && t <= horizon).collect();
    checkpoints.push(horizon);
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = LearnerState::new(n, k);
    let mut totals = vec![0.0; n];
    let mut cumulative = Vec::with_capacity(checkpoints.len());
    let mut next_checkpoint = 0;
    let mut rounds = cfg.record_rounds.then(Vec::new);
    let mut exploit: Option<Plan> = None;
    let mut jobs = vec![None; n];
    let mut rewards = vec![0.0; n];

    for t in 1..=horizon {
        match &exploit {
            None => {
                for (w, slot) in jobs.iter_mut().enumerate() {
                    *slot = Some((t as usize + w) % k);
                }
            }
            Some(plan) => {
                let mu = sample(&plan.support, &mut rng);
                for (w, slot) in jobs.iter_mut().enumerate() {
                    *slot = mu.job_of(w);
                }
            }
        }
        for w in 0..n {
            rewards[w] = match jobs[w] {
                None => 0.0,
                Some(a) => {
                    let noise: f64 = if cfg.sigma > 0.0 { rng.sample(StandardNormal) } else { 0.0 };
                    env.means.utility(w, a) + cfg.sigma * noise
                }
            };
            totals[w] += rewards[w];
        }
        if let Some(log) = rounds.as_mut() {
            log.push(RoundRecord { jobs: jobs.clone(), rewards: rewards.clone() });
        }
        if next_checkpoint < checkpoints.len() && checkpoints[next_checkpoint] == t {
            cumulative.push(totals.clone());
            next_checkpoint += 1;
        }

        if exploit.is_none() {
            for w in 0..n {
                state.observe(w, jobs[w].expect("exploration matches everyone"), rewards[w]);
            }
            if t % k as u64 == 0 {
                state.cycles += 1;
                state.flags = gap_flags(&state, horizon);
                if state.flags.iter().all(|&f| f) {
                    let mu = empirical_gale_shapley(env, &state)?;
                    exploit = Some(Plan {
                        oracle: OracleChoice::GaleShapley,
                        support: vec![(mu.clone(), 1.0)],
                        exploitation: Exploitation::Fixed(mu),
                        eps: None,
                        switch_round: t,
                    });
                } else if t == t0 {
                    let (dist, eps) = oracle_distribution(env, &state, cfg)?;
                    let support = dist.support().iter().map(|(mu, p)| (mu.clone(), p.to_f64())).collect();
                    let eps = (cfg.oracle == OracleKind::Eps).then_some(eps);
                    exploit = Some(Plan {
                        oracle: OracleChoice::Approximation,
                        support,
                        exploitation: Exploitation::Sampled(dist),
                        eps,
                        switch_round: t,
                    });
                }
            }
        }
    }

    let plan = exploit.ok_or_else(|| Error::Precondition("exploration never ended".into()))?;
    Ok(RegretTrace {
        horizon,
        t0,
        switch_round: plan.switch_round,
        oracle: plan.oracle,
        exploitation: plan.exploitation,
        oracle_eps: plan.eps,
        oss: env.oss.clone(),
        checkpoints,
        cumulative,
        rounds,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub checkpoint_t: u64,
    pub worker: usize,
    pub mean_reg: f64,
    pub stderr_reg: f64,
    pub mean_reg_alpha: f64,
    pub stderr_reg_alpha: f64,
    pub frac_runs_gs_oracle: f64,
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, sqrt(var / n))
}

/// Seed-averaged regret curves against `OSS` and `alpha · OSS`.
pub fn regret_report(traces: &[RegretTrace], alpha: &[f64]) -> Result<Vec<ReportRow>> {
    let first = traces.first().ok_or_else(|| Error::InvalidParameter("no traces to aggregate".into()))?;
    let n = first.oss.len();
    if alpha.len() != n {
        return Err(Error::Shape(alloc::format!("{} alpha values for {n} workers", alpha.len())));
    }
    if traces.iter().any(|tr| tr.checkpoints != first.checkpoints || tr.oss.len() != n) {
        return Err(Error::Shape("traces disagree on checkpoints or market size".into()));
    }
    let gs = traces.iter().filter(|tr| tr.oracle == OracleChoice::GaleShapley).count() as f64 / traces.len() as f64;
    let mut rows = Vec::with_capacity(first.checkpoints.len() * n);
    for (c, &t) in first.checkpoints.iter().enumerate() {
        for (w, &a) in alpha.iter().enumerate() {
            let reg: Vec<f64> = traces.iter().map(|tr| tr.regret(c, w)).collect();
            let reg_alpha: Vec<f64> = traces.iter().map(|tr| tr.regret_alpha(c, w, a)).collect();
            let (mean_reg, stderr_reg) = mean_stderr(&reg);
            let (mean_reg_alpha, stderr_reg_alpha) = mean_stderr(&reg_alpha);
            rows.push(ReportRow {
                checkpoint_t: t,
                worker: w,
                mean_reg,
                stderr_reg,
                mean_reg_alpha,
                stderr_reg_alpha,
                frac_runs_gs_oracle: gs,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::scalar::{int, ratio};
    use crate::stability::enumerate_stable_matchings;

    fn env(inst: &MarketInstance) -> BanditEnv {
        BanditEnv::new(inst, EnumBound::default()).unwrap()
    }

    fn gapped() -> MarketInstance {
        MarketInstance::new(
            2,
            3,
            vec![vec![int(1), ratio(1, 2), int(0)], vec![int(0), int(1), ratio(1, 2)]],
            vec![vec![0, 1], vec![1, 0], vec![0, 1]],
        )
        .unwrap()
    }

    #[test]
    fn confidence_bound_formula() {
        let mut s = LearnerState::new(1, 2);
        let horizon = 403; // ln 403 ≈ 5.999
        let (ucb, lcb) = confidence_bounds(&s, horizon);
        assert!((ucb[0][0] - sqrt(6.0 * log(403.0))).abs() < 1e-12);
        assert!((ucb[0][0] + lcb[0][0]).abs() < 1e-12);
        let count = (24.0 * log(horizon as f64)).round() as u64;
        for _ in 0..count {
            s.observe(0, 1, 0.3);
        }
        let (ucb, lcb) = confidence_bounds(&s, horizon);
        assert!((ucb[0][1] - lcb[0][1] - 2.0 * half_width(count, horizon)).abs() < 1e-12);
        assert!((half_width(count, horizon) - 0.5).abs() < 1e-2);
    }

    #[test]
    fn min_gap_truncates_when_square() {
        assert_eq!(min_gap(&[0.2, 1.0, 0.5], 2), 0.3);
        assert_eq!(min_gap(&[0.2, 1.0, 0.5], 1), 0.5);
        assert_eq!(min_gap(&[1.0, 0.5], 2), 0.5);
        assert_eq!(min_gap(&[0.7], 1), f64::INFINITY);
    }

    #[test]
    fn t0_policies() {
        let cfg = BanditConfig::new(100_000, T0Policy::HalfLog, 0);
        let t0 = cfg.resolved_t0(3).unwrap();
        assert_eq!(t0 % 3, 0);
        assert!((t0 as f64 - 100_000.0 / (2.0 * log(1e5))).abs() < 3.0);
        let cfg = BanditConfig::new(10, T0Policy::Explicit(10), 0);
        assert!(cfg.resolved_t0(2).is_err());
        let cfg = BanditConfig::new(10, T0Policy::Explicit(1), 0);
        assert!(cfg.resolved_t0(2).is_err());
    }

    #[test]
    fn deterministic_large_gap_commits_to_stable_matching() {
        let inst = gapped();
        let e = env(&inst);
        let mut cfg = BanditConfig::new(100_000, T0Policy::HalfLog, 1);
        cfg.sigma = 0.0;
        cfg.checkpoints.clear();
        let trace = simulate_etco(&e, &cfg).unwrap();
        assert_eq!(trace.oracle, OracleChoice::GaleShapley);
        // flags rise once t_m > 24 ln T / Δ² = 96 ln T
        let cycles = (96.0 * log(100_000.0)).floor() as u64 + 1;
        assert_eq!(trace.switch_round, cycles * 3);
        let stable = enumerate_stable_matchings(&inst, &int(0), EnumBound::default()).unwrap();
        let Exploitation::Fixed(mu) = &trace.exploitation else { panic!() };
        assert_eq!(stable.len(), 1);
        assert_eq!(mu, &stable[0]);
        let explore: f64 = (0..2).map(|w| inst.utility_row(w).iter().map(|u| u.to_f64()).sum::<f64>()).sum();
        let reg = trace.regret(0, 0) + trace.regret(0, 1);
        assert!((reg - (2.0 * trace.switch_round as f64 - explore * cycles as f64)).abs() < 1e-6);
    }

    #[test]
    fn ties_force_the_approximation_oracle() {
        let e = env(&gen::example1());
        assert_eq!(e.n_jobs(), 3);
        for seed in 0..3 {
            let mut cfg = BanditConfig::new(3_000, T0Policy::TwoThirds, seed);
            cfg.sigma = if seed == 0 { 0.0 } else { 1.0 };
            let trace = simulate_etco(&e, &cfg).unwrap();
            assert_eq!(trace.oracle, OracleChoice::Approximation);
            assert_eq!(trace.switch_round, trace.t0);
        }
    }

    #[test]
    fn exploration_counts_advance_per_cycle() {
        let e = env(&gapped());
        let mut cfg = BanditConfig::new(200, T0Policy::Explicit(60), 3);
        cfg.record_rounds = true;
        let trace = simulate_etco(&e, &cfg).unwrap();
        let rounds = trace.rounds.as_ref().unwrap();
        let mut counts = [[0u64; 3]; 2];
        for (t, r) in rounds.iter().take(trace.switch_round as usize).enumerate() {
            for w in 0..2 {
                counts[w][r.jobs[w].unwrap()] += 1;
            }
            if (t + 1) % 3 == 0 {
                let cycles = (t as u64 + 1) / 3;
                assert!(counts.iter().flatten().all(|&c| c == cycles));
            }
        }
        for w in 0..2 {
            let sum: f64 = rounds.iter().map(|r| r.rewards[w]).sum();
            assert!((sum + trace.regret(trace.checkpoints.len() - 1, w) - 200.0 * trace.oss[w]).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_meets_its_guarantee_without_noise() {
        let nu = gen::appendix_h_nu();
        let e = env(&nu);
        let mut cfg = BanditConfig::new(20_000, T0Policy::TwoThirds, 0);
        cfg.sigma = 0.0;
        cfg.pareto_fill = false;
        let trace = simulate_etco(&e, &cfg).unwrap();
        let Exploitation::Sampled(dist) = &trace.exploitation else { panic!() };
        let eps = trace.oracle_eps.unwrap();
        let m = default_m(4) as f64;
        for w in 0..4 {
            let u = dist.expected_utility(&e.instance, w).unwrap().to_f64();
            assert!(u >= e.oss[w] / m - eps - 1e-12);
        }
    }

    #[test]
    fn report_aggregates() {
        let e = env(&gapped());
        let cfg = BanditConfig::new(300, T0Policy::Explicit(90), 5);
        let one = simulate_etco(&e, &cfg).unwrap();
        let rows = regret_report(core::slice::from_ref(&one), &[1.0, 1.0]).unwrap();
        assert_eq!(rows.len(), one.checkpoints.len() * 2);
        let last = &rows[rows.len() - 1];
        assert_eq!(last.stderr_reg, 0.0);
        assert_eq!(last.mean_reg, one.regret(one.checkpoints.len() - 1, 1));
        assert_eq!(last.mean_reg, last.mean_reg_alpha);
        let two = simulate_etco(&e, &BanditConfig { seed: 6, ..cfg.clone() }).unwrap();
        let rows = regret_report(&[one.clone(), two], &[1.0, 0.5]).unwrap();
        assert!(rows.iter().all(|r| r.stderr_reg >= 0.0));
        assert!(regret_report(&[], &[1.0]).is_err());
        assert!(regret_report(&[one], &[1.0]).is_err());
    }

    #[test]
    fn seeds_are_reproducible() {
        let e = env(&gen::appendix_h_nu());
        let cfg = BanditConfig::new(2_000, T0Policy::TwoThirds, 11);
        assert_eq!(simulate_etco(&e, &cfg).unwrap(), simulate_etco(&e, &cfg).unwrap());
    }
}
