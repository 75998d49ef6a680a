//! Deferred acceptance and the job-duplication oracles.
//!
//! The duplication oracle copies every job `m` times, orders the copies for
//! each worker by utility (ties broken towards lower copy index, then lower
//! job index), runs worker-proposing deferred acceptance, and splits the
//! result by copy index into `m` internally stable matchings. Mixing them
//! uniformly gives every worker at least `OSS(w)/m` in expectation once
//! `m ≥ ⌊log2 N⌋ + 2`.
//!
//! The ε-variant lowers the utility of copy `i` by `(i − 1)·ε`, trading an
//! additive `ε` for robustness to estimation error.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::market::{check_permutation, MarketInstance, Matching, MatchingDistribution, WorkerPrefProfile};
use crate::scalar::Scalar;
use crate::stability::is_internally_stable;

/// Worker-proposing deferred acceptance on strict preferences.
///
/// `job_prefs[x]` ranks all workers for item `x` of the worker profile's
/// universe. Workers only propose within their acceptable prefix. Free
/// workers propose in index order. Returns the worker-optimal stable
/// matching as a workers × universe matching.
pub fn deferred_acceptance(worker_prefs: &WorkerPrefProfile, job_prefs: &[Vec<usize>]) -> Result<Matching> {
    let n_workers = worker_prefs.n_workers();
    let universe = worker_prefs.universe();
    if job_prefs.len() != universe {
        return Err(Error::Shape(format!(
            "{} job lists for a universe of {universe} items",
            job_prefs.len()
        )));
    }
    let mut rank = vec![0usize; universe * n_workers];
    for (x, list) in job_prefs.iter().enumerate() {
        check_permutation(list, n_workers)
            .map_err(|msg| Error::MalformedPreferences(format!("list of item {}: {msg}", x + 1)))?;
        for (pos, &w) in list.iter().enumerate() {
            rank[x * n_workers + w] = pos;
        }
    }

    let mut holder: Vec<Option<usize>> = vec![None; universe];
    let mut next = vec![0usize; n_workers];
    let mut free: VecDeque<usize> = (0..n_workers).collect();
    while let Some(w) = free.pop_front() {
        let list = worker_prefs.acceptable(w);
        let Some(&x) = list.get(next[w]) else {
            continue;
        };
        next[w] += 1;
        match holder[x] {
            None => holder[x] = Some(w),
            Some(h) if rank[x * n_workers + w] < rank[x * n_workers + h] => {
                holder[x] = Some(w);
                free.push_back(h);
            }
            Some(_) => free.push_back(w),
        }
    }

    let mut out = Matching::empty(n_workers, universe);
    for (x, h) in holder.iter().enumerate() {
        if let Some(w) = *h {
            out.insert(w, x)?;
        }
    }
    Ok(out)
}

/// `m` copies of every job of a `n_jobs`-job market. Item `copy·n_jobs + job`
/// is copy `copy` (0-based) of `job`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DuplicatedUniverse {
    pub n_jobs: usize,
    pub m: usize,
}

impl DuplicatedUniverse {
    pub fn size(&self) -> usize {
        self.n_jobs * self.m
    }

    #[inline]
    pub fn item(&self, job: usize, copy: usize) -> usize {
        copy * self.n_jobs + job
    }

    /// `(job, copy)` of an item.
    #[inline]
    pub fn split(&self, item: usize) -> (usize, usize) {
        (item % self.n_jobs, item / self.n_jobs)
    }

    /// Every copy inherits the ranking of its job.
    pub fn job_prefs<S: Scalar>(&self, inst: &MarketInstance<S>) -> Vec<Vec<usize>> {
        (0..self.size()).map(|x| inst.job_prefs()[x % self.n_jobs].clone()).collect()
    }
}

fn check_oracle_params<S: Scalar>(m: usize, eps: &S) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("duplication count m must be at least 1".into()));
    }
    if eps.is_negative() {
        return Err(Error::NegativeEpsilon);
    }
    Ok(())
}

/// Worker orders over the duplicated universe.
///
/// Copy `i` (0-based) of job `a` is valued `U(w, a) − i·ε`; items are sorted
/// by that value (descending), then copy index, then job index. Items with
/// value `≤ 0` stay at the tail of the order but are unacceptable.
pub fn build_duplicated_profiles<S: Scalar>(
    inst: &MarketInstance<S>,
    m: usize,
    eps: &S,
) -> Result<WorkerPrefProfile> {
    check_oracle_params(m, eps)?;
    let uni = DuplicatedUniverse { n_jobs: inst.n_jobs(), m };
    let shifts: Vec<S> = (0..m).map(|i| S::from_count(i) * eps.clone()).collect();
    let mut orders = Vec::with_capacity(inst.n_workers());
    let mut acceptable = Vec::with_capacity(inst.n_workers());
    for w in 0..inst.n_workers() {
        let mut items: Vec<(S, usize, usize)> = (0..m)
            .flat_map(|copy| {
                let shift = &shifts[copy];
                (0..inst.n_jobs()).map(move |a| (inst.utility(w, a).clone() - shift.clone(), copy, a))
            })
            .collect();
        items.sort_by(|x, y| {
            y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2))
        });
        acceptable.push(items.iter().filter(|(v, _, _)| v.is_positive()).count());
        orders.push(items.into_iter().map(|(_, copy, a)| uni.item(a, copy)).collect());
    }
    WorkerPrefProfile::new(uni.size(), orders, acceptable)
}

/// Deferred acceptance outcome on the duplicated market.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicationOutcome {
    pub universe: DuplicatedUniverse,
    /// `(job, copy)` received by each worker.
    pub assignment: Vec<Option<(usize, usize)>>,
}

impl DuplicationOutcome {
    /// Copy index of the job a worker received (its "index").
    pub fn index(&self, worker: usize) -> Option<usize> {
        self.assignment[worker].map(|(_, copy)| copy)
    }

    /// Worker holding copy `copy` of `job`.
    pub fn holder(&self, job: usize, copy: usize) -> Option<usize> {
        self.assignment.iter().position(|x| *x == Some((job, copy)))
    }

    /// `μ̃_i(a) := μ̃(a^(i))` for every copy `i`.
    pub fn copy_matchings(&self) -> Vec<Matching> {
        let n_workers = self.assignment.len();
        let mut out = vec![Matching::empty(n_workers, self.universe.n_jobs); self.universe.m];
        for (w, slot) in self.assignment.iter().enumerate() {
            if let Some((a, copy)) = *slot {
                out[copy].insert(w, a).expect("copies of a job go to distinct matchings");
            }
        }
        out
    }

    /// Uniform mixture of the copy matchings (identical ones merged).
    pub fn distribution(&self) -> MatchingDistribution {
        MatchingDistribution::uniform(self.copy_matchings()).expect("m >= 1")
    }
}

/// Builds the duplicated profiles and runs deferred acceptance on them.
pub fn duplicate_and_match<S: Scalar>(
    inst: &MarketInstance<S>,
    m: usize,
    eps: &S,
) -> Result<DuplicationOutcome> {
    let profile = build_duplicated_profiles(inst, m, eps)?;
    let universe = DuplicatedUniverse { n_jobs: inst.n_jobs(), m };
    let matched = deferred_acceptance(&profile, &universe.job_prefs(inst))?;
    let assignment = (0..inst.n_workers())
        .map(|w| matched.job_of(w).map(|x| universe.split(x)))
        .collect();
    Ok(DuplicationOutcome { universe, assignment })
}

/// Duplication oracle: uniform distribution over `m` internally stable
/// matchings.
pub fn ism_oracle<S: Scalar>(inst: &MarketInstance<S>, m: usize) -> Result<MatchingDistribution> {
    eps_oracle(inst, m, &S::zero())
}

/// ε-oracle: the duplication oracle with copy `i` shifted down by `(i−1)·ε`.
pub fn eps_oracle<S: Scalar>(inst: &MarketInstance<S>, m: usize, eps: &S) -> Result<MatchingDistribution> {
    Ok(duplicate_and_match(inst, m, eps)?.distribution())
}

/// `⌊log2 N⌋ + 2`, the duplication count with a proven guarantee.
pub fn default_m(n_workers: usize) -> usize {
    n_workers.max(1).ilog2() as usize + 2
}

/// `⌈log2 N⌉`, at least 1.
pub fn ceil_log2_m(n_workers: usize) -> usize {
    match n_workers {
        0 | 1 => 1,
        n => (usize::BITS - (n - 1).leading_zeros()) as usize,
    }
}

/// Per-entry closed intervals `[lower, upper]` around a utility matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintySet<S> {
    lower: MarketInstance<S>,
    upper: MarketInstance<S>,
}

impl<S: Scalar> UncertaintySet<S> {
    /// Bounds must satisfy `0 ≤ lower ≤ upper ≤ 1` entry-wise.
    pub fn new(lower: Vec<Vec<S>>, upper: Vec<Vec<S>>, job_prefs: Vec<Vec<usize>>) -> Result<Self> {
        let n_workers = lower.len();
        let n_jobs = job_prefs.len();
        let lower = MarketInstance::new(n_workers, n_jobs, lower, job_prefs.clone())?;
        let upper = MarketInstance::new(n_workers, n_jobs, upper, job_prefs)?;
        let one = S::one();
        for w in 0..n_workers {
            for a in 0..n_jobs {
                let (lo, hi) = (lower.utility(w, a), upper.utility(w, a));
                let ordered = lo.partial_cmp(hi).is_some_and(|o| o != Ordering::Greater);
                if !ordered || lo.is_negative() || hi.total_cmp(&one) == Ordering::Greater {
                    return Err(Error::InvalidParameter(format!(
                        "interval for (w{}, a{}) is not within 0 <= lower <= upper <= 1",
                        w + 1,
                        a + 1
                    )));
                }
            }
        }
        Ok(Self { lower, upper })
    }

    /// Intervals of half-width `radius` around `center`, clipped to `[0, 1]`.
    pub fn around(center: &MarketInstance<S>, radius: &S) -> Result<Self> {
        if radius.is_negative() {
            return Err(Error::InvalidParameter("negative radius".into()));
        }
        let clip = |x: S| {
            if x.is_negative() {
                S::zero()
            } else if x.total_cmp(&S::one()) == Ordering::Greater {
                S::one()
            } else {
                x
            }
        };
        let rows = center.utility_rows();
        let lower = rows.iter().map(|r| r.iter().map(|u| clip(u.clone() - radius.clone())).collect()).collect();
        let upper = rows.iter().map(|r| r.iter().map(|u| clip(u.clone() + radius.clone())).collect()).collect();
        Self::new(lower, upper, center.job_prefs().to_vec())
    }

    /// Entry-wise midpoint.
    pub fn center(&self) -> MarketInstance<S> {
        let two = S::from_count(2);
        self.lower.map_utilities(|w, a, lo| (lo.clone() + self.upper.utility(w, a).clone()) / two.clone())
    }

    /// Largest interval width, i.e. the max-norm diameter of the set.
    pub fn diameter(&self) -> S {
        let mut best = S::zero();
        for w in 0..self.lower.n_workers() {
            for a in 0..self.lower.n_jobs() {
                let width = self.upper.utility(w, a).clone() - self.lower.utility(w, a).clone();
                if width.total_cmp(&best) == Ordering::Greater {
                    best = width;
                }
            }
        }
        best
    }
}

/// Result of [`batch_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutput<S> {
    pub center: MarketInstance<S>,
    /// `2 × diameter`.
    pub eps: S,
    pub m: usize,
    pub distribution: MatchingDistribution,
}

/// Runs the ε-oracle on the center of an uncertainty set with
/// `ε = 2·diameter` and `m = ⌈log2 N⌉`.
pub fn batch_oracle<S: Scalar>(set: &UncertaintySet<S>) -> Result<BatchOutput<S>> {
    let center = set.center();
    let eps = S::from_count(2) * set.diameter();
    let m = ceil_log2_m(center.n_workers());
    let distribution = eps_oracle(&center, m, &eps)?;
    Ok(BatchOutput { center, eps, m, distribution })
}

/// Greedily adds pairs of unmatched workers and unallocated jobs to every
/// support matching while internal stability is kept.
///
/// Candidates are tried by decreasing utility, ties by worker then job
/// index. Expected utilities never decrease.
pub fn pareto_fill<S: Scalar>(inst: &MarketInstance<S>, dist: &MatchingDistribution) -> Result<MatchingDistribution> {
    let mut filled = Vec::with_capacity(dist.support().len());
    for (mu, p) in dist.support() {
        if !is_internally_stable(inst, mu)? {
            return Err(Error::Precondition(format!("support matching {mu} is not internally stable")));
        }
        let mut mu = mu.clone();
        let mut candidates: Vec<(usize, usize)> = (0..inst.n_workers())
            .filter(|&w| mu.job_of(w).is_none())
            .flat_map(|w| (0..inst.n_jobs()).map(move |a| (w, a)))
            .filter(|&(w, a)| mu.worker_of(a).is_none() && inst.acceptable(w, a))
            .collect();
        candidates.sort_by(|&(w1, a1), &(w2, a2)| {
            inst.utility(w2, a2).total_cmp(inst.utility(w1, a1)).then((w1, a1).cmp(&(w2, a2)))
        });
        for (w, a) in candidates {
            if mu.job_of(w).is_some() || mu.worker_of(a).is_some() {
                continue;
            }
            mu.insert(w, a)?;
            if !is_internally_stable(inst, &mu)? {
                mu.remove_worker(w);
            }
        }
        filled.push((mu, p.clone()));
    }
    MatchingDistribution::merged(filled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::scalar::{int, ratio, Rational};
    use crate::stability::{enumerate_stable_matchings, EnumBound};

    fn m(n_workers: usize, n_jobs: usize, pairs: &[(usize, usize)]) -> Matching {
        Matching::from_pairs(n_workers, n_jobs, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn example2_profiles_m2() {
        let inst = gen::example2();
        let p = build_duplicated_profiles(&inst, 2, &int(0)).unwrap();
        let u = DuplicatedUniverse { n_jobs: 3, m: 2 };
        // (job, copy), both 1-based as printed
        let named = |w: usize| -> Vec<(usize, usize)> {
            p.order(w).iter().map(|&x| {
                let (a, c) = u.split(x);
                (a + 1, c + 1)
            }).collect()
        };
        assert_eq!(named(0), vec![(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (3, 2)]);
        assert_eq!(named(1), vec![(1, 1), (1, 2), (2, 1), (3, 1), (2, 2), (3, 2)]);
        assert_eq!(named(2), vec![(2, 1), (2, 2), (1, 1), (3, 1), (1, 2), (3, 2)]);
        assert_eq!(p.acceptable(0).len(), 4);
        assert_eq!(p.acceptable(2).len(), 2);
    }

    #[test]
    fn example2_deferred_acceptance_m2() {
        let inst = gen::example2();
        let p = build_duplicated_profiles(&inst, 2, &int(0)).unwrap();
        let u = DuplicatedUniverse { n_jobs: 3, m: 2 };
        let mu = deferred_acceptance(&p, &u.job_prefs(&inst)).unwrap();
        // (w1, a2^(1)), (w2, a1^(1)), (w3, a2^(2))
        assert_eq!(mu, m(3, 6, &[(0, u.item(1, 0)), (1, u.item(0, 0)), (2, u.item(1, 1))]));
    }

    #[test]
    fn example2_ism_oracle() {
        let inst = gen::example2();
        let d = ism_oracle(&inst, 2).unwrap();
        assert_eq!(
            d.support(),
            &[(m(3, 3, &[(0, 1), (1, 0)]), ratio(1, 2)), (m(3, 3, &[(2, 1)]), ratio(1, 2))]
        );
        assert_eq!(eps_oracle(&inst, 2, &int(0)).unwrap(), d);
    }

    #[test]
    fn single_worker_single_job() {
        let p = WorkerPrefProfile::from_acceptable_lists(1, vec![vec![0]]).unwrap();
        assert_eq!(deferred_acceptance(&p, &[vec![0]]).unwrap(), m(1, 1, &[(0, 0)]));
    }

    #[test]
    fn deferred_acceptance_rejects_bad_lists() {
        let p = WorkerPrefProfile::from_acceptable_lists(2, vec![vec![0], vec![1]]).unwrap();
        assert!(deferred_acceptance(&p, &[vec![0, 0], vec![0, 1]]).is_err());
        assert!(deferred_acceptance(&p, &[vec![0, 1]]).is_err());
    }

    /// Workers pick their favourite remaining job in priority order.
    fn serial_dictatorship(inst: &MarketInstance<Rational>) -> Matching {
        let order = inst.job_prefs()[0].clone();
        let mut mu = Matching::empty(inst.n_workers(), inst.n_jobs());
        for w in order {
            let best = (0..inst.n_jobs())
                .filter(|&a| mu.worker_of(a).is_none() && inst.acceptable(w, a))
                .max_by(|&a, &b| inst.utility(w, a).cmp(inst.utility(w, b)).then(b.cmp(&a)));
            if let Some(a) = best {
                mu.insert(w, a).unwrap();
            }
        }
        mu
    }

    #[test]
    fn serial_dictatorship_matches_greedy_picking() {
        let inst = MarketInstance::new(
            3,
            3,
            vec![
                vec![ratio(1, 2), ratio(9, 10), ratio(1, 10)],
                vec![ratio(3, 10), ratio(4, 5), ratio(7, 10)],
                vec![ratio(1, 5), ratio(1, 4), ratio(3, 5)],
            ],
            vec![vec![1, 2, 0]; 3],
        )
        .unwrap();
        assert_eq!(ism_oracle(&inst, 1).unwrap(), MatchingDistribution::point(serial_dictatorship(&inst)));
    }

    #[test]
    fn m1_orders_by_utility_then_index() {
        let inst = gen::example2();
        let p = build_duplicated_profiles(&inst, 1, &int(0)).unwrap();
        assert_eq!(p.order(1), &[0, 1, 2]);
        assert_eq!(p.order(2), &[1, 0, 2]);
    }

    #[test]
    fn shifted_utilities_interleave_copies() {
        let inst = MarketInstance::with_global_ranking(vec![vec![ratio(1, 2), ratio(9, 20)]]).unwrap();
        let p = build_duplicated_profiles(&inst, 2, &ratio(3, 10)).unwrap();
        // a1(1), a2(1), a1(2), a2(2)
        assert_eq!(p.order(0), &[0, 1, 2, 3]);
        assert_eq!(p.acceptable(0).len(), 4);
        let tight = build_duplicated_profiles(&inst, 2, &ratio(1, 2)).unwrap();
        assert_eq!(tight.acceptable(0), &[0, 1]);
    }

    #[test]
    fn oracle_rejects_bad_parameters() {
        let inst = gen::example1();
        assert!(ism_oracle(&inst, 0).is_err());
        assert!(eps_oracle(&inst, 2, &ratio(-1, 10)).is_err());
    }

    #[test]
    fn m1_on_tie_free_instance_is_worker_optimal() {
        let inst = gen::appendix_h_nu_prime(ratio(1, 10)).unwrap();
        let stable = enumerate_stable_matchings(&inst, &int(0), EnumBound::default()).unwrap();
        assert_eq!(ism_oracle(&inst, 1).unwrap(), MatchingDistribution::point(stable[0].clone()));
    }

    #[test]
    fn default_and_ceil_m() {
        assert_eq!(default_m(1), 2);
        assert_eq!(default_m(3), 3);
        assert_eq!(default_m(4), 4);
        assert_eq!(default_m(8), 5);
        assert_eq!(ceil_log2_m(1), 1);
        assert_eq!(ceil_log2_m(3), 2);
        assert_eq!(ceil_log2_m(4), 2);
        assert_eq!(ceil_log2_m(5), 3);
    }

    #[test]
    fn zero_width_batch_reduces_to_ism() {
        let inst = gen::example1();
        let set = UncertaintySet::around(&inst, &int(0)).unwrap();
        let out = batch_oracle(&set).unwrap();
        assert_eq!(out.eps, int(0));
        assert_eq!(out.m, 2);
        assert_eq!(out.center, inst);
        assert_eq!(out.distribution, ism_oracle(&inst, 2).unwrap());
    }

    #[test]
    fn uncertainty_set_bounds_are_checked() {
        let prefs = vec![vec![0]];
        assert!(UncertaintySet::new(vec![vec![int(0)]], vec![vec![int(4)]], prefs.clone()).is_err());
        assert!(UncertaintySet::new(vec![vec![int(1)]], vec![vec![ratio(1, 2)]], prefs.clone()).is_err());
        let ok = UncertaintySet::new(vec![vec![ratio(1, 4)]], vec![vec![ratio(3, 4)]], prefs).unwrap();
        assert_eq!(ok.diameter(), ratio(1, 2));
        assert_eq!(*ok.center().utility(0, 0), ratio(1, 2));
    }

    #[test]
    fn pareto_fill_on_example2() {
        let inst = gen::example2();
        let d = ism_oracle(&inst, 2).unwrap();
        let filled = pareto_fill(&inst, &d).unwrap();
        assert_eq!(
            filled.support(),
            &[(m(3, 3, &[(0, 1), (1, 0)]), ratio(1, 2)), (m(3, 3, &[(0, 0), (2, 1)]), ratio(1, 2))]
        );
        let before = d.expected_utilities(&inst).unwrap();
        let after = filled.expected_utilities(&inst).unwrap();
        assert!(before.iter().zip(&after).all(|(b, a)| a >= b));
    }

    #[test]
    fn pareto_fill_identity_on_full_matchings() {
        let inst = gen::example1();
        let d = MatchingDistribution::point(m(3, 2, &[(0, 0), (2, 1)]));
        assert_eq!(pareto_fill(&inst, &d).unwrap(), d);
    }

    #[test]
    fn pareto_fill_requires_internal_stability() {
        let inst = gen::example2();
        // w2 and a1 are both matched and prefer each other
        let d = MatchingDistribution::point(m(3, 3, &[(0, 0), (1, 1)]));
        assert!(matches!(pareto_fill(&inst, &d), Err(Error::Precondition(_))));
    }
}
