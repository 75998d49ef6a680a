//! Market instances, matchings and distributions over matchings.
//!
//! Indices are 0-based throughout the library. Textual output (errors,
//! violations) names agents 1-based, `w1..wN` and `a1..aK`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Rank assigned to workers missing from a (malformed) job list.
const UNRANKED: usize = usize::MAX;

/// A one-to-one market: a worker × job utility matrix with ties allowed on
/// the worker side, and a strict ranking of workers for every job.
///
/// A utility of exactly zero marks the job as unacceptable to the worker.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketInstance<S = Rational> {
    n_workers: usize,
    n_jobs: usize,
    utility: Vec<S>,
    job_prefs: Vec<Vec<usize>>,
    job_rank: Vec<usize>,
}

impl<S: Scalar> MarketInstance<S> {
    /// Builds an instance from a row-major utility matrix (`utility[w][a]`)
    /// and per-job worker rankings, most preferred first.
    ///
    /// Only the shape is checked here; value ranges and permutation
    /// properties are reported by [`MarketInstance::validate`].
    pub fn new(
        n_workers: usize,
        n_jobs: usize,
        utility: Vec<Vec<S>>,
        job_prefs: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if utility.len() != n_workers {
            return Err(Error::Shape(format!(
                "utility has {} rows, expected {n_workers}",
                utility.len()
            )));
        }
        if let Some((w, row)) = utility.iter().enumerate().find(|(_, r)| r.len() != n_jobs) {
            return Err(Error::Shape(format!(
                "utility row {} has {} entries, expected {n_jobs}",
                w + 1,
                row.len()
            )));
        }
        if job_prefs.len() != n_jobs {
            return Err(Error::Shape(format!(
                "job_prefs has {} lists, expected {n_jobs}",
                job_prefs.len()
            )));
        }
        let mut job_rank = vec![UNRANKED; n_jobs * n_workers];
        for (a, list) in job_prefs.iter().enumerate() {
            for (pos, &w) in list.iter().enumerate() {
                if w >= n_workers {
                    return Err(Error::WorkerOutOfRange { worker: w, n_workers });
                }
                let slot = &mut job_rank[a * n_workers + w];
                if *slot == UNRANKED {
                    *slot = pos;
                }
            }
        }
        Ok(Self {
            n_workers,
            n_jobs,
            utility: utility.into_iter().flatten().collect(),
            job_prefs,
            job_rank,
        })
    }

    /// Instance where every job ranks workers by index (`w1 ≻ w2 ≻ …`).
    pub fn with_global_ranking(utility: Vec<Vec<S>>) -> Result<Self> {
        let n_workers = utility.len();
        let n_jobs = utility.first().map_or(0, Vec::len);
        let prefs = vec![(0..n_workers).collect(); n_jobs];
        Self::new(n_workers, n_jobs, utility, prefs)
    }

    pub fn n_workers(&self) -> usize {
        self.n_workers
    }

    pub fn n_jobs(&self) -> usize {
        self.n_jobs
    }

    /// `U(w, a)`.
    #[inline]
    pub fn utility(&self, worker: usize, job: usize) -> &S {
        &self.utility[worker * self.n_jobs + job]
    }

    /// `U(w, μ(w))`, zero when unmatched.
    pub fn utility_of(&self, worker: usize, job: Option<usize>) -> S {
        job.map_or_else(S::zero, |a| self.utility(worker, a).clone())
    }

    pub fn utility_row(&self, worker: usize) -> &[S] {
        &self.utility[worker * self.n_jobs..(worker + 1) * self.n_jobs]
    }

    pub fn job_prefs(&self) -> &[Vec<usize>] {
        &self.job_prefs
    }

    /// Position of `worker` in `job`'s ranking (0 = most preferred).
    #[inline]
    pub fn rank(&self, job: usize, worker: usize) -> usize {
        self.job_rank[job * self.n_workers + worker]
    }

    /// Whether `job` strictly prefers `worker` to its current holder; an
    /// unassigned job prefers anyone.
    #[inline]
    pub fn job_prefers(&self, job: usize, worker: usize, holder: Option<usize>) -> bool {
        match holder {
            None => true,
            Some(h) => self.rank(job, worker) < self.rank(job, h),
        }
    }

    #[inline]
    pub fn acceptable(&self, worker: usize, job: usize) -> bool {
        self.utility(worker, job).is_positive()
    }

    /// Utility matrix as nested rows.
    pub fn utility_rows(&self) -> Vec<Vec<S>> {
        self.utility.chunks(self.n_jobs.max(1)).take(self.n_workers).map(<[S]>::to_vec).collect()
    }

    /// Same job rankings, utilities transformed entry-wise.
    pub fn map_utilities<T: Scalar>(&self, mut f: impl FnMut(usize, usize, &S) -> T) -> MarketInstance<T> {
        let utility = (0..self.n_workers * self.n_jobs)
            .map(|idx| f(idx / self.n_jobs, idx % self.n_jobs, &self.utility[idx]))
            .collect();
        MarketInstance {
            n_workers: self.n_workers,
            n_jobs: self.n_jobs,
            utility,
            job_prefs: self.job_prefs.clone(),
            job_rank: self.job_rank.clone(),
        }
    }

    /// Floating view of the utilities.
    pub fn to_f64(&self) -> MarketInstance<f64> {
        self.map_utilities(|_, _, u| u.to_f64())
    }

    /// Copy of the instance with one worker's utility row replaced.
    pub fn with_worker_row(&self, worker: usize, row: Vec<S>) -> Result<Self> {
        if worker >= self.n_workers {
            return Err(Error::WorkerOutOfRange { worker, n_workers: self.n_workers });
        }
        if row.len() != self.n_jobs {
            return Err(Error::Shape(format!("row has {} entries, expected {}", row.len(), self.n_jobs)));
        }
        let mut out = self.clone();
        out.utility[worker * self.n_jobs..(worker + 1) * self.n_jobs].clone_from_slice(&row);
        Ok(out)
    }

    /// Pads the market with zero-utility jobs until it has `n_jobs` jobs.
    /// New jobs rank workers by index.
    pub fn pad_jobs(&self, n_jobs: usize) -> Self {
        if n_jobs <= self.n_jobs {
            return self.clone();
        }
        let mut rows = self.utility_rows();
        for row in &mut rows {
            row.resize(n_jobs, S::zero());
        }
        if self.n_workers == 0 {
            rows.clear();
        }
        let mut prefs = self.job_prefs.clone();
        prefs.resize(n_jobs, (0..self.n_workers).collect());
        Self::new(self.n_workers, n_jobs, rows, prefs).expect("padding preserves shape")
    }

    /// Every invariant violation of the instance; empty iff it is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let one = S::one();
        for w in 0..self.n_workers {
            for a in 0..self.n_jobs {
                let u = self.utility(w, a);
                if u.is_negative() || u.total_cmp(&one) == Ordering::Greater {
                    out.push(Violation::UtilityOutOfRange { worker: w, job: a, value: u.to_f64() });
                }
            }
        }
        for (a, list) in self.job_prefs.iter().enumerate() {
            let mut seen = vec![0usize; self.n_workers];
            for &w in list {
                seen[w] += 1;
            }
            let missing: Vec<usize> = (0..self.n_workers).filter(|&w| seen[w] == 0).collect();
            let repeated: Vec<usize> = (0..self.n_workers).filter(|&w| seen[w] > 1).collect();
            if !missing.is_empty() || !repeated.is_empty() {
                out.push(Violation::NotPermutation { job: a, missing, repeated });
            }
        }
        out
    }
}

/// List of invariant violations; empty iff the instance is valid.
pub fn validate_instance<S: Scalar>(inst: &MarketInstance<S>) -> Vec<Violation> {
    inst.validate()
}

/// A broken [`MarketInstance`] invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    UtilityOutOfRange { worker: usize, job: usize, value: f64 },
    NotPermutation { job: usize, missing: Vec<usize>, repeated: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UtilityOutOfRange { worker, job, value } => write!(
                f,
                "utility U(w{}, a{}) = {value} is outside [0, 1]",
                worker + 1,
                job + 1
            ),
            Violation::NotPermutation { job, missing, repeated } => {
                write!(f, "preference list of a{} is not a permutation of the workers", job + 1)?;
                if !missing.is_empty() {
                    write!(f, "; missing {}", worker_names(missing))?;
                }
                if !repeated.is_empty() {
                    write!(f, "; repeated {}", worker_names(repeated))?;
                }
                Ok(())
            }
        }
    }
}

fn worker_names(ws: &[usize]) -> String {
    ws.iter().map(|w| format!("w{}", w + 1)).collect::<Vec<_>>().join(", ")
}

/// A partial one-to-one assignment of workers to jobs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    of_worker: Vec<Option<usize>>,
    of_job: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(n_workers: usize, n_jobs: usize) -> Self {
        Self { of_worker: vec![None; n_workers], of_job: vec![None; n_jobs] }
    }

    /// Matching from `(worker, job)` pairs; fails if any agent repeats.
    pub fn from_pairs(
        n_workers: usize,
        n_jobs: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut m = Self::empty(n_workers, n_jobs);
        for (w, a) in pairs {
            m.insert(w, a)?;
        }
        Ok(m)
    }

    /// Adds the pair `(worker, job)`; both must currently be unmatched.
    pub fn insert(&mut self, worker: usize, job: usize) -> Result<()> {
        if worker >= self.of_worker.len() {
            return Err(Error::WorkerOutOfRange { worker, n_workers: self.of_worker.len() });
        }
        if job >= self.of_job.len() {
            return Err(Error::JobOutOfRange { job, n_jobs: self.of_job.len() });
        }
        if let Some(a) = self.of_worker[worker] {
            return Err(Error::NotInjective(format!("w{} already holds a{}", worker + 1, a + 1)));
        }
        if let Some(w) = self.of_job[job] {
            return Err(Error::NotInjective(format!("a{} already held by w{}", job + 1, w + 1)));
        }
        self.of_worker[worker] = Some(job);
        self.of_job[job] = Some(worker);
        Ok(())
    }

    pub(crate) fn remove_worker(&mut self, worker: usize) {
        if let Some(a) = self.of_worker[worker].take() {
            self.of_job[a] = None;
        }
    }

    pub fn n_workers(&self) -> usize {
        self.of_worker.len()
    }

    pub fn n_jobs(&self) -> usize {
        self.of_job.len()
    }

    /// `μ(w)`.
    #[inline]
    pub fn job_of(&self, worker: usize) -> Option<usize> {
        self.of_worker[worker]
    }

    /// `μ(a)`.
    #[inline]
    pub fn worker_of(&self, job: usize) -> Option<usize> {
        self.of_job[job]
    }

    /// Assigned pairs in increasing worker order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.of_worker.iter().enumerate().filter_map(|(w, a)| a.map(|a| (w, a)))
    }

    pub fn len(&self) -> usize {
        self.of_worker.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks dimensions and that every assigned pair has positive utility.
    pub fn check_against<S: Scalar>(&self, inst: &MarketInstance<S>) -> Result<()> {
        if self.n_workers() != inst.n_workers() || self.n_jobs() != inst.n_jobs() {
            return Err(Error::Shape(format!(
                "matching is {}x{}, instance is {}x{}",
                self.n_workers(),
                self.n_jobs(),
                inst.n_workers(),
                inst.n_jobs()
            )));
        }
        match self.pairs().find(|&(w, a)| !inst.acceptable(w, a)) {
            Some((worker, job)) => Err(Error::UnacceptablePair { worker, job }),
            None => Ok(()),
        }
    }
}

impl PartialOrd for Matching {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order of the sorted pair lists.
impl Ord for Matching {
    fn cmp(&self, other: &Self) -> Ordering {
        self.pairs()
            .cmp(other.pairs())
            .then_with(|| self.of_worker.len().cmp(&other.of_worker.len()))
            .then_with(|| self.of_job.len().cmp(&other.of_job.len()))
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (w, a)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "(w{}, a{})", w + 1, a + 1)?;
        }
        f.write_str("}")
    }
}

/// A finite probability distribution over pairwise distinct matchings.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingDistribution {
    support: Vec<(Matching, Rational)>,
}

impl MatchingDistribution {
    /// Checks that probabilities lie in `(0, 1]`, sum to one, and that the
    /// support has no repeated matching.
    pub fn new(support: Vec<(Matching, Rational)>) -> Result<Self> {
        let Some((first, _)) = support.first() else {
            return Err(Error::Precondition("distribution has empty support".into()));
        };
        let dims = (first.n_workers(), first.n_jobs());
        let mut total = Rational::zero();
        for (i, (m, p)) in support.iter().enumerate() {
            if (m.n_workers(), m.n_jobs()) != dims {
                return Err(Error::Shape("support matchings have different dimensions".into()));
            }
            if !p.is_positive() || *p > Rational::one() {
                return Err(Error::Precondition(format!("probability {p} outside (0, 1]")));
            }
            if support[..i].iter().any(|(other, _)| other == m) {
                return Err(Error::Precondition(format!("matching {m} appears twice")));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::Precondition(format!("probabilities sum to {total}")));
        }
        Ok(Self { support })
    }

    /// Point mass on one matching.
    pub fn point(matching: Matching) -> Self {
        Self { support: vec![(matching, Rational::one())] }
    }

    /// Uniform mixture of the given matchings; repeated matchings are merged
    /// and keep the position of their first occurrence.
    pub fn uniform(matchings: Vec<Matching>) -> Result<Self> {
        if matchings.is_empty() {
            return Err(Error::Precondition("uniform mixture of no matchings".into()));
        }
        let weight = Rational::new(1.into(), matchings.len().into());
        Self::merged(matchings.into_iter().map(|m| (m, weight.clone())))
    }

    /// Builds a distribution, summing the weight of repeated matchings and
    /// dropping zero-weight entries.
    pub fn merged(entries: impl IntoIterator<Item = (Matching, Rational)>) -> Result<Self> {
        let mut support: Vec<(Matching, Rational)> = Vec::new();
        let mut index: BTreeMap<Matching, usize> = BTreeMap::new();
        for (m, p) in entries {
            if p.is_zero() {
                continue;
            }
            match index.get(&m) {
                Some(&i) => support[i].1 += p,
                None => {
                    index.insert(m.clone(), support.len());
                    support.push((m, p));
                }
            }
        }
        Self::new(support)
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &Self, lambda: &Rational) -> Result<Self> {
        if lambda.is_negative() || *lambda > Rational::one() {
            return Err(Error::InvalidParameter(format!("mixing weight {lambda} outside [0, 1]")));
        }
        let rest = Rational::one() - lambda;
        Self::merged(
            self.support
                .iter()
                .map(|(m, p)| (m.clone(), p * lambda))
                .chain(other.support.iter().map(|(m, p)| (m.clone(), p * &rest))),
        )
    }

    pub fn support(&self) -> &[(Matching, Rational)] {
        &self.support
    }

    pub fn probability_of(&self, matching: &Matching) -> Rational {
        self.support
            .iter()
            .find(|(m, _)| m == matching)
            .map_or_else(Rational::zero, |(_, p)| p.clone())
    }

    /// `U_D(w) = E_{μ∼D}[U(w, μ(w))]`.
    pub fn expected_utility<S: Scalar>(&self, inst: &MarketInstance<S>, worker: usize) -> Result<S> {
        if worker >= inst.n_workers() {
            return Err(Error::WorkerOutOfRange { worker, n_workers: inst.n_workers() });
        }
        let mut total = S::zero();
        for (m, p) in &self.support {
            if worker >= m.n_workers() {
                return Err(Error::WorkerOutOfRange { worker, n_workers: m.n_workers() });
            }
            if let Some(a) = m.job_of(worker) {
                total = total + S::from_rational(p) * inst.utility(worker, a).clone();
            }
        }
        Ok(total)
    }

    /// `U_D(w)` for every worker.
    pub fn expected_utilities<S: Scalar>(&self, inst: &MarketInstance<S>) -> Result<Vec<S>> {
        (0..inst.n_workers()).map(|w| self.expected_utility(inst, w)).collect()
    }

    /// Checks every support matching against the instance.
    pub fn check_against<S: Scalar>(&self, inst: &MarketInstance<S>) -> Result<()> {
        self.support.iter().try_for_each(|(m, _)| m.check_against(inst))
    }
}

/// `U_D(w)`; see [`MatchingDistribution::expected_utility`].
pub fn expected_utility<S: Scalar>(
    inst: &MarketInstance<S>,
    dist: &MatchingDistribution,
    worker: usize,
) -> Result<S> {
    dist.expected_utility(inst, worker)
}

/// Strict worker preference orders over a job universe (possibly a
/// duplicated one).
///
/// Each order is a full permutation of the universe; only the first
/// `acceptable[w]` entries are ones the worker agrees to be matched with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerPrefProfile {
    universe: usize,
    orders: Vec<Vec<usize>>,
    acceptable: Vec<usize>,
}

impl WorkerPrefProfile {
    pub fn new(universe: usize, orders: Vec<Vec<usize>>, acceptable: Vec<usize>) -> Result<Self> {
        if orders.len() != acceptable.len() {
            return Err(Error::Shape("one acceptable-prefix length per worker required".into()));
        }
        for (w, order) in orders.iter().enumerate() {
            check_permutation(order, universe).map_err(|msg| {
                Error::MalformedPreferences(format!("list of w{}: {msg}", w + 1))
            })?;
            if acceptable[w] > universe {
                return Err(Error::MalformedPreferences(format!(
                    "w{} accepts {} of {universe} items",
                    w + 1,
                    acceptable[w]
                )));
            }
        }
        Ok(Self { universe, orders, acceptable })
    }

    /// Profile from lists of acceptable items only; remaining items are
    /// appended in index order as unacceptable.
    pub fn from_acceptable_lists(universe: usize, lists: Vec<Vec<usize>>) -> Result<Self> {
        let mut orders = Vec::with_capacity(lists.len());
        let mut acceptable = Vec::with_capacity(lists.len());
        for (w, list) in lists.into_iter().enumerate() {
            let mut seen = vec![false; universe];
            for &x in &list {
                if x >= universe || core::mem::replace(&mut seen[x], true) {
                    return Err(Error::MalformedPreferences(format!(
                        "list of w{} repeats or exceeds the universe at item {x}",
                        w + 1
                    )));
                }
            }
            acceptable.push(list.len());
            let mut order = list;
            order.extend((0..universe).filter(|&x| !seen[x]));
            orders.push(order);
        }
        Self::new(universe, orders, acceptable)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn n_workers(&self) -> usize {
        self.orders.len()
    }

    /// Full order of worker `w`, most preferred first.
    pub fn order(&self, worker: usize) -> &[usize] {
        &self.orders[worker]
    }

    /// Acceptable prefix of worker `w`'s order.
    pub fn acceptable(&self, worker: usize) -> &[usize] {
        &self.orders[worker][..self.acceptable[worker]]
    }
}

pub(crate) fn check_permutation(list: &[usize], n: usize) -> core::result::Result<(), String> {
    if list.len() != n {
        return Err(format!("has {} entries, expected {n}", list.len()));
    }
    let mut seen = vec![false; n];
    for &x in list {
        if x >= n {
            return Err(format!("entry {x} out of range"));
        }
        if core::mem::replace(&mut seen[x], true) {
            return Err(format!("entry {x} repeated"));
        }
    }
    Ok(())
}
