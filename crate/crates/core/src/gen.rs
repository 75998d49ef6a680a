//! Instance generators: the structured families used to exhibit lower
//! bounds, the worked examples, and seeded random markets.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::market::MarketInstance;
use crate::scalar::{int, ratio, Rational};

/// Name and version of the random generator's PRNG, recorded next to
/// generated instances.
pub const RANDOM_ALGORITHM: &str = "chacha8-v1";

/// Parameters of a generated instance.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Thm1 { n_workers: usize },
    RecursiveIn { n: u32 },
    Example1,
    Example2,
    AppendixHNu,
    AppendixHNuPrime { gamma: Rational },
    Random(RandomSpec),
}

/// Seeded random market with utilities on the grid `{0, 1/g, …, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub n_workers: usize,
    pub n_jobs: usize,
    pub seed: u64,
    /// Probability that an entry copies a value already present in its row.
    pub tie_prob: f64,
    /// Grid resolution `g`.
    pub grid: u32,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<MarketInstance> {
        match self {
            GeneratorSpec::Thm1 { n_workers } => thm1(*n_workers),
            GeneratorSpec::RecursiveIn { n } => recursive_in(*n),
            GeneratorSpec::Example1 => Ok(example1()),
            GeneratorSpec::Example2 => Ok(example2()),
            GeneratorSpec::AppendixHNu => Ok(appendix_h_nu()),
            GeneratorSpec::AppendixHNuPrime { gamma } => appendix_h_nu_prime(gamma.clone()),
            GeneratorSpec::Random(spec) => random(spec),
        }
    }
}

fn binary(rows: &[&[u8]]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&x| int(x.into())).collect()).collect()
}

/// Three workers, two jobs, global ranking `w1 ≻ w2 ≻ w3`; two stable
/// matchings, every worker has an optimal stable share of 1.
pub fn example1() -> MarketInstance {
    MarketInstance::with_global_ranking(binary(&[&[1, 1], &[1, 0], &[0, 1]])).expect("static shape")
}

/// Three workers and three jobs with distinct job rankings, used to
/// illustrate the duplication oracle.
pub fn example2() -> MarketInstance {
    let u = vec![
        vec![int(1), int(1), int(0)],
        vec![ratio(1, 2), ratio(1, 10), ratio(1, 10)],
        vec![int(0), ratio(4, 5), int(0)],
    ];
    let prefs = vec![vec![1, 0, 2], vec![0, 2, 1], vec![0, 1, 2]];
    MarketInstance::new(3, 3, u, prefs).expect("static shape")
}

/// `N/2` skilled workers, each liking their own job and a shared extra job,
/// and `N/2` regular workers, each liking only the job of their skilled
/// counterpart. Every stable matching serves at most one regular worker.
pub fn thm1(n_workers: usize) -> Result<MarketInstance> {
    if n_workers < 2 || !n_workers.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("N = {n_workers} must be even and at least 2")));
    }
    let half = n_workers / 2;
    let n_jobs = half + 1;
    let rows = (0..n_workers)
        .map(|w| {
            (0..n_jobs)
                .map(|a| {
                    let on = if w < half { a == w || a == half } else { a == w - half };
                    if on { Rational::one() } else { Rational::zero() }
                })
                .collect()
        })
        .collect();
    MarketInstance::with_global_ranking(rows)
}

/// Recursive family `I_n` with `2^n` jobs and `(n + 2)·2^(n−1)` workers
/// where every worker has an optimal stable share of 1 but any distribution
/// over matchings leaves someone with at most a `2/(n+2)` fraction.
///
/// `I_n` stacks `K_(n−1)` prioritized workers above two copies (upper, then
/// lower) of `I_(n−1)`; prioritized worker `i` likes job `i` in both copies.
pub fn recursive_in(n: u32) -> Result<MarketInstance> {
    if n > 12 {
        return Err(Error::InvalidParameter(format!("I_{n} is too large")));
    }
    let rows = in_rows(n);
    MarketInstance::with_global_ranking(rows)
}

fn in_rows(n: u32) -> Vec<Vec<Rational>> {
    if n == 0 {
        return vec![vec![Rational::one()]];
    }
    let prev = in_rows(n - 1);
    let k_prev = prev[0].len();
    let width = 2 * k_prev;
    let mut rows = Vec::with_capacity(k_prev + 2 * prev.len());
    for i in 0..k_prev {
        let mut row = vec![Rational::zero(); width];
        row[i] = Rational::one();
        row[k_prev + i] = Rational::one();
        rows.push(row);
    }
    for row in &prev {
        let mut upper = row.clone();
        upper.resize(width, Rational::zero());
        rows.push(upper);
    }
    for row in &prev {
        let mut lower = vec![Rational::zero(); k_prev];
        lower.extend(row.iter().cloned());
        rows.push(lower);
    }
    rows
}

fn appendix_h_rows(top_left: Rational) -> Vec<Vec<Rational>> {
    let h = ratio(1, 2);
    let q = ratio(1, 4);
    let z = Rational::zero;
    vec![
        vec![top_left, h.clone(), z(), z()],
        vec![h.clone(), z(), h.clone(), z()],
        vec![h.clone(), z(), z(), q],
        vec![z(), z(), h, z()],
    ]
}

/// Four-worker serial dictatorship whose ties force an approximation
/// benchmark of `(1/2, 3/8, 3/8, 3/8)`.
pub fn appendix_h_nu() -> MarketInstance {
    MarketInstance::with_global_ranking(appendix_h_rows(ratio(1, 2))).expect("static shape")
}

/// [`appendix_h_nu`] with `U(w1, a1)` raised by `gamma ∈ (0, 1/4)`, which
/// breaks every relevant tie.
pub fn appendix_h_nu_prime(gamma: Rational) -> Result<MarketInstance> {
    if gamma <= Rational::zero() || gamma >= ratio(1, 4) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must lie in (0, 1/4)")));
    }
    MarketInstance::with_global_ranking(appendix_h_rows(ratio(1, 2) + gamma))
}

/// Random market fully determined by the spec.
///
/// Each entry either repeats a value already drawn in its row (with
/// probability `tie_prob`) or takes a grid value not yet used in the row,
/// so `tie_prob = 0` with `grid ≥ n_jobs` yields tie-free rows. Job
/// rankings are independent uniform permutations.
pub fn random(spec: &RandomSpec) -> Result<MarketInstance> {
    if !(0.0..=1.0).contains(&spec.tie_prob) {
        return Err(Error::InvalidParameter(format!("tie_prob = {} outside [0, 1]", spec.tie_prob)));
    }
    if spec.grid == 0 {
        return Err(Error::InvalidParameter("grid must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let grid = spec.grid;
    let mut rows = Vec::with_capacity(spec.n_workers);
    for _ in 0..spec.n_workers {
        let mut used: Vec<u32> = Vec::with_capacity(spec.n_jobs);
        let mut row = Vec::with_capacity(spec.n_jobs);
        for _ in 0..spec.n_jobs {
            let value = if !used.is_empty() && rng.random_bool(spec.tie_prob) {
                used[rng.random_range(0..used.len())]
            } else {
                let free: Vec<u32> = (0..=grid).filter(|v| !used.contains(v)).collect();
                if free.is_empty() {
                    rng.random_range(0..=grid)
                } else {
                    free[rng.random_range(0..free.len())]
                }
            };
            used.push(value);
            row.push(ratio(value.into(), grid.into()));
        }
        rows.push(row);
    }
    let prefs = (0..spec.n_jobs)
        .map(|_| {
            let mut p: Vec<usize> = (0..spec.n_workers).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    MarketInstance::new(spec.n_workers, spec.n_jobs, rows, prefs)
}
