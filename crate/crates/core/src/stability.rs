//! Blocking pairs, stability notions and exhaustive enumeration.
//!
//! A pair `(w, a)` ε-blocks `μ` when `a` strictly prefers `w` to `μ(a)`
//! (an unassigned job prefers any worker) and `U(w, a) > U(w, μ(w)) + ε`.
//! Weak stability is the case `ε = 0`. Internal stability only considers
//! pairs whose worker and job are both matched.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::market::{MarketInstance, Matching};
use crate::scalar::Scalar;

/// What a reported pair blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockingKind {
    Weak,
    Internal,
    /// Blocking with tolerance; the tolerance is stored on the report.
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockingPair {
    pub worker: usize,
    pub job: usize,
    pub kind: BlockingKind,
}

/// The blocking pairs of a matching, in `(worker, job)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockingReport<S> {
    pub eps: S,
    pub pairs: Vec<BlockingPair>,
}

impl<S> BlockingReport<S> {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, worker: usize, job: usize) -> bool {
        self.pairs.iter().any(|p| p.worker == worker && p.job == job)
    }
}

#[inline]
fn blocks<S: Scalar>(inst: &MarketInstance<S>, mu: &Matching, w: usize, a: usize, eps: &S) -> bool {
    inst.job_prefers(a, w, mu.worker_of(a))
        && inst.utility(w, a).total_cmp(&(inst.utility_of(w, mu.job_of(w)) + eps.clone()))
            == Ordering::Greater
}

/// All ε-blocking pairs of `mu` (`ε = 0` gives weak blocking pairs).
pub fn blocking_pairs<S: Scalar>(
    inst: &MarketInstance<S>,
    mu: &Matching,
    eps: &S,
) -> Result<BlockingReport<S>> {
    if eps.is_negative() {
        return Err(Error::NegativeEpsilon);
    }
    mu.check_against(inst)?;
    let kind = if eps.is_zero() { BlockingKind::Weak } else { BlockingKind::Epsilon };
    let mut pairs = Vec::new();
    for w in 0..inst.n_workers() {
        for a in 0..inst.n_jobs() {
            if mu.job_of(w) != Some(a) && blocks(inst, mu, w, a, eps) {
                pairs.push(BlockingPair { worker: w, job: a, kind });
            }
        }
    }
    Ok(BlockingReport { eps: eps.clone(), pairs })
}

/// Blocking pairs among matched workers and matched jobs only.
pub fn internal_blocking_pairs<S: Scalar>(
    inst: &MarketInstance<S>,
    mu: &Matching,
) -> Result<BlockingReport<S>> {
    mu.check_against(inst)?;
    let zero = S::zero();
    let mut pairs = Vec::new();
    for (w, own) in mu.pairs() {
        for a in 0..inst.n_jobs() {
            if a != own && mu.worker_of(a).is_some() && blocks(inst, mu, w, a, &zero) {
                pairs.push(BlockingPair { worker: w, job: a, kind: BlockingKind::Internal });
            }
        }
    }
    Ok(BlockingReport { eps: zero, pairs })
}

pub fn is_weakly_stable<S: Scalar>(inst: &MarketInstance<S>, mu: &Matching) -> Result<bool> {
    is_eps_stable(inst, mu, &S::zero())
}

pub fn is_eps_stable<S: Scalar>(inst: &MarketInstance<S>, mu: &Matching, eps: &S) -> Result<bool> {
    Ok(blocking_pairs(inst, mu, eps)?.is_empty())
}

pub fn is_internally_stable<S: Scalar>(inst: &MarketInstance<S>, mu: &Matching) -> Result<bool> {
    Ok(internal_blocking_pairs(inst, mu)?.is_empty())
}

/// Size limit for exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumBound {
    pub max_workers: usize,
    pub max_jobs: usize,
}

impl Default for EnumBound {
    fn default() -> Self {
        Self { max_workers: 8, max_jobs: 8 }
    }
}

impl EnumBound {
    pub fn new(max: usize) -> Self {
        Self { max_workers: max, max_jobs: max }
    }

    pub fn check<S: Scalar>(&self, inst: &MarketInstance<S>) -> Result<()> {
        if inst.n_workers() > self.max_workers || inst.n_jobs() > self.max_jobs {
            return Err(Error::EnumerationBound {
                n_workers: inst.n_workers(),
                n_jobs: inst.n_jobs(),
                bound: self.max_workers.max(self.max_jobs),
            });
        }
        Ok(())
    }
}

/// Every acceptable matching (including the empty one), each exactly once,
/// in lexicographic order of the sorted pair lists.
pub fn enumerate_matchings<'a, S: Scalar>(
    inst: &'a MarketInstance<S>,
    bound: EnumBound,
) -> Result<Matchings<'a, S>> {
    bound.check(inst)?;
    Ok(Matchings {
        inst,
        current: Matching::empty(inst.n_workers(), inst.n_jobs()),
        stack: Vec::new(),
        started: false,
    })
}

/// Next candidate `(worker, job)` and the pair that opened the frame.
type Frame = ((usize, usize), Option<(usize, usize)>);

/// Lazy depth-first enumeration; see [`enumerate_matchings`].
pub struct Matchings<'a, S> {
    inst: &'a MarketInstance<S>,
    current: Matching,
    stack: Vec<Frame>,
    started: bool,
}

impl<S: Scalar> Iterator for Matchings<'_, S> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if !self.started {
            self.started = true;
            self.stack.push(((0, 0), None));
            return Some(self.current.clone());
        }
        let (n_workers, n_jobs) = (self.inst.n_workers(), self.inst.n_jobs());
        while let Some(frame) = self.stack.last_mut() {
            let (mut w, mut a) = frame.0;
            let mut found = None;
            while w < n_workers {
                if a >= n_jobs {
                    w += 1;
                    a = 0;
                    continue;
                }
                if self.current.worker_of(a).is_none() && self.inst.acceptable(w, a) {
                    found = Some((w, a));
                    break;
                }
                a += 1;
            }
            match found {
                Some((w, a)) => {
                    frame.0 = (w, a + 1);
                    self.current.insert(w, a).expect("free worker and job");
                    self.stack.push(((w + 1, 0), Some((w, a))));
                    return Some(self.current.clone());
                }
                None => {
                    let (_, opened_by) = self.stack.pop().expect("non-empty stack");
                    if let Some((w, _)) = opened_by {
                        self.current.remove_worker(w);
                    }
                }
            }
        }
        None
    }
}

/// All ε-stable matchings, sorted.
///
/// Uses a backtracking search over workers in index order that rejects a
/// partial assignment as soon as a blocking pair is certain, so the result
/// equals filtering [`enumerate_matchings`] by [`is_eps_stable`] without
/// visiting every matching.
pub fn enumerate_stable_matchings<S: Scalar>(
    inst: &MarketInstance<S>,
    eps: &S,
    bound: EnumBound,
) -> Result<Vec<Matching>> {
    if eps.is_negative() {
        return Err(Error::NegativeEpsilon);
    }
    bound.check(inst)?;
    let mut search = StableSearch {
        inst,
        eps,
        current: Matching::empty(inst.n_workers(), inst.n_jobs()),
        threshold: vec![usize::MAX; inst.n_jobs()],
        out: Vec::new(),
    };
    search.visit(0);
    let mut out = search.out;
    out.sort();
    Ok(out)
}

struct StableSearch<'a, S> {
    inst: &'a MarketInstance<S>,
    eps: &'a S,
    current: Matching,
    /// For each still unassigned job, the best rank among decided workers
    /// that would block it; the job must end up with someone ranked higher.
    threshold: Vec<usize>,
    out: Vec<Matching>,
}

impl<S: Scalar> StableSearch<'_, S> {
    fn visit(&mut self, w: usize) {
        let inst = self.inst;
        if w == inst.n_workers() {
            let pending = (0..inst.n_jobs())
                .any(|a| self.threshold[a] != usize::MAX && self.current.worker_of(a).is_none());
            if !pending {
                self.out.push(self.current.clone());
            }
            return;
        }
        self.try_option(w, None);
        for a in 0..inst.n_jobs() {
            if self.current.worker_of(a).is_none()
                && inst.acceptable(w, a)
                && inst.rank(a, w) < self.threshold[a]
            {
                self.try_option(w, Some(a));
            }
        }
    }

    fn try_option(&mut self, w: usize, choice: Option<usize>) {
        let inst = self.inst;
        let bar = inst.utility_of(w, choice) + self.eps.clone();
        let mut lowered = Vec::new();
        for b in 0..inst.n_jobs() {
            if Some(b) == choice || inst.utility(w, b).total_cmp(&bar) != Ordering::Greater {
                continue;
            }
            match self.current.worker_of(b) {
                Some(holder) => {
                    if inst.rank(b, w) < inst.rank(b, holder) {
                        self.restore(lowered);
                        return;
                    }
                }
                None => {
                    let r = inst.rank(b, w);
                    if r < self.threshold[b] {
                        lowered.push((b, self.threshold[b]));
                        self.threshold[b] = r;
                    }
                }
            }
        }
        if let Some(a) = choice {
            self.current.insert(w, a).expect("free worker and job");
        }
        self.visit(w + 1);
        if choice.is_some() {
            self.current.remove_worker(w);
        }
        self.restore(lowered);
    }

    fn restore(&mut self, lowered: Vec<(usize, usize)>) {
        for (b, old) in lowered.into_iter().rev() {
            self.threshold[b] = old;
        }
    }
}

/// All internally stable matchings, in enumeration order.
pub fn enumerate_internally_stable<S: Scalar>(
    inst: &MarketInstance<S>,
    bound: EnumBound,
) -> Result<Vec<Matching>> {
    let mut out = Vec::new();
    for m in enumerate_matchings(inst, bound)? {
        if is_internally_stable(inst, &m)? {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::scalar::{int, ratio, Rational};

    fn m(n_workers: usize, n_jobs: usize, pairs: &[(usize, usize)]) -> Matching {
        Matching::from_pairs(n_workers, n_jobs, pairs.iter().copied()).unwrap()
    }

    /// Direct transcription of the blocking-pair definition.
    fn brute_blocking(inst: &MarketInstance<Rational>, mu: &Matching, eps: &Rational) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for w in 0..inst.n_workers() {
            for a in 0..inst.n_jobs() {
                let job_side = match mu.worker_of(a) {
                    None => true,
                    Some(h) => inst.job_prefs()[a].iter().position(|&x| x == w)
                        < inst.job_prefs()[a].iter().position(|&x| x == h),
                };
                let own = mu.job_of(w).map_or(int(0), |b| inst.utility(w, b).clone());
                if job_side && *inst.utility(w, a) > own + eps {
                    out.push((w, a));
                }
            }
        }
        out
    }

    #[test]
    fn example1_stable_matchings_have_no_blocking_pairs() {
        let inst = gen::example1();
        for mu in [m(3, 2, &[(0, 0), (2, 1)]), m(3, 2, &[(0, 1), (1, 0)])] {
            assert!(blocking_pairs(&inst, &mu, &int(0)).unwrap().is_empty());
            assert!(is_weakly_stable(&inst, &mu).unwrap());
        }
    }

    #[test]
    fn example1_unstable_matching_blocked_by_w1() {
        let inst = gen::example1();
        let mu = m(3, 2, &[(1, 0), (2, 1)]);
        let report = blocking_pairs(&inst, &mu, &int(0)).unwrap();
        assert!(report.contains(0, 0) && report.contains(0, 1));
        let found: Vec<_> = report.pairs.iter().map(|p| (p.worker, p.job)).collect();
        assert_eq!(found, brute_blocking(&inst, &mu, &int(0)));
    }

    #[test]
    fn eps_one_never_blocks() {
        let inst = gen::example1();
        for mu in enumerate_matchings(&inst, EnumBound::default()).unwrap() {
            assert!(blocking_pairs(&inst, &mu, &int(1)).unwrap().is_empty());
        }
    }

    #[test]
    fn negative_eps_is_rejected() {
        let inst = gen::example1();
        let mu = Matching::empty(3, 2);
        assert_eq!(blocking_pairs(&inst, &mu, &int(-1)), Err(Error::NegativeEpsilon));
        assert!(enumerate_stable_matchings(&inst, &ratio(-1, 2), EnumBound::default()).is_err());
    }

    #[test]
    fn remark1_half_matching_is_not_stable() {
        let inst = gen::thm1(4).unwrap();
        let mu2 = m(4, 3, &[(2, 0), (3, 1)]);
        assert!(!is_weakly_stable(&inst, &mu2).unwrap());
    }

    #[test]
    fn empty_matching_is_blocked_when_anything_is_acceptable() {
        let inst = gen::example1();
        assert!(!is_weakly_stable(&inst, &Matching::empty(3, 2)).unwrap());
    }

    #[test]
    fn example1_internal_stability() {
        let inst = gen::example1();
        for pairs in [[(0, 0)], [(0, 1)], [(1, 0)], [(2, 1)]] {
            assert!(is_internally_stable(&inst, &m(3, 2, &pairs)).unwrap());
        }
        let internally: Vec<_> = enumerate_internally_stable(&inst, EnumBound::default())
            .unwrap()
            .into_iter()
            .filter(|mu| !mu.is_empty())
            .collect();
        // four singletons, the two stable matchings, and {(w2,a1),(w3,a2)}
        // which only the unmatched w1 could block
        assert_eq!(internally.len(), 7);
    }

    #[test]
    fn example2_second_copy_is_internally_stable() {
        let inst = gen::example2();
        assert!(is_internally_stable(&inst, &m(3, 3, &[(2, 1)])).unwrap());
    }

    #[test]
    fn example1_enumeration() {
        let inst = gen::example1();
        let all: Vec<_> = enumerate_matchings(&inst, EnumBound::default()).unwrap().collect();
        let expected = vec![
            m(3, 2, &[]),
            m(3, 2, &[(0, 0)]),
            m(3, 2, &[(0, 0), (2, 1)]),
            m(3, 2, &[(0, 1)]),
            m(3, 2, &[(0, 1), (1, 0)]),
            m(3, 2, &[(1, 0)]),
            m(3, 2, &[(1, 0), (2, 1)]),
            m(3, 2, &[(2, 1)]),
        ];
        assert_eq!(all, expected);
    }

    #[test]
    fn enumeration_small_cases() {
        let zero = MarketInstance::with_global_ranking(vec![vec![int(0)]]).unwrap();
        let all: Vec<_> = enumerate_matchings(&zero, EnumBound::default()).unwrap().collect();
        assert_eq!(all, vec![Matching::empty(1, 1)]);

        let ones = MarketInstance::with_global_ranking(vec![vec![int(1); 2]; 2]).unwrap();
        assert_eq!(enumerate_matchings(&ones, EnumBound::default()).unwrap().count(), 7);
    }

    #[test]
    fn enumeration_bound_is_enforced() {
        let inst = gen::thm1(4).unwrap();
        assert!(enumerate_matchings(&inst, EnumBound::new(3)).is_err());
        assert!(enumerate_stable_matchings(&inst, &int(0), EnumBound::new(3)).is_err());
    }

    #[test]
    fn example1_stable_set() {
        let inst = gen::example1();
        let stable = enumerate_stable_matchings(&inst, &int(0), EnumBound::default()).unwrap();
        assert_eq!(stable, vec![m(3, 2, &[(0, 0), (2, 1)]), m(3, 2, &[(0, 1), (1, 0)])]);
    }

    #[test]
    fn thm1_n4_has_three_stable_matchings() {
        let inst = gen::thm1(4).unwrap();
        let stable = enumerate_stable_matchings(&inst, &int(0), EnumBound::default()).unwrap();
        assert_eq!(stable.len(), 3);
        for mu in &stable {
            assert_eq!(inst.utility_of(0, mu.job_of(0)), int(1));
            assert_eq!(inst.utility_of(1, mu.job_of(1)), int(1));
            let regular = (2..4).filter(|&w| inst.utility_of(w, mu.job_of(w)) == int(1)).count();
            assert!(regular <= 1);
        }
    }

    #[test]
    fn eps_one_makes_every_matching_stable() {
        let inst = gen::example2();
        let all = enumerate_matchings(&inst, EnumBound::default()).unwrap().count();
        let stable = enumerate_stable_matchings(&inst, &int(1), EnumBound::default()).unwrap();
        assert_eq!(stable.len(), all);
    }

    #[test]
    fn pruned_search_matches_filter_on_families() {
        for inst in [gen::example1(), gen::example2(), gen::thm1(4).unwrap(), gen::appendix_h_nu()] {
            for eps in [int(0), ratio(1, 10), ratio(1, 4)] {
                let filtered: Vec<_> = enumerate_matchings(&inst, EnumBound::default())
                    .unwrap()
                    .filter(|mu| is_eps_stable(&inst, mu, &eps).unwrap())
                    .collect();
                let mut filtered = filtered;
                filtered.sort();
                assert_eq!(enumerate_stable_matchings(&inst, &eps, EnumBound::default()).unwrap(), filtered);
            }
        }
    }
}
