//! Optimal stable shares and max-min share ratios over matching classes.
//!
//! Everything here enumerates, so it is limited to small instances (see
//! [`EnumBound`]). Ratios are solved exactly with [`crate::lp`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::market::{MarketInstance, Matching, MatchingDistribution};
use crate::scalar::{Rational, Scalar};
use crate::stability::{
    enumerate_internally_stable, enumerate_matchings, enumerate_stable_matchings, is_internally_stable, EnumBound,
};

/// Best utility each worker gets in some ε-stable matching (0 if never matched).
pub fn oss<S: Scalar>(inst: &MarketInstance<S>, eps: &S, bound: EnumBound) -> Result<Vec<S>> {
    let mut best = vec![S::zero(); inst.n_workers()];
    for mu in enumerate_stable_matchings(inst, eps, bound)? {
        for (w, a) in mu.pairs() {
            if inst.utility(w, a) > &best[w] {
                best[w] = inst.utility(w, a).clone();
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingClass {
    All,
    InternallyStable,
    Stable,
    EpsStable(Rational),
}

impl fmt::Display for MatchingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingClass::All => f.write_str("M"),
            MatchingClass::InternallyStable => f.write_str("I"),
            MatchingClass::Stable => f.write_str("S"),
            MatchingClass::EpsStable(eps) => write!(f, "S_eps({eps})"),
        }
    }
}

/// Members of `class` that can appear in an optimal max-min distribution.
///
/// For `All` and `InternallyStable` only inclusion-maximal members are
/// returned: both classes are closed under removing pairs, and growing a
/// matching never lowers anyone's utility, so the optimum is unchanged.
pub fn class_members(inst: &MarketInstance, class: &MatchingClass, bound: EnumBound) -> Result<Vec<Matching>> {
    let n_jobs = inst.n_jobs();
    let can_grow = |mu: &Matching, keep_internal: bool| -> Result<bool> {
        for w in 0..inst.n_workers() {
            if mu.job_of(w).is_some() {
                continue;
            }
            for a in 0..n_jobs {
                if mu.worker_of(a).is_some() || !inst.acceptable(w, a) {
                    continue;
                }
                if !keep_internal {
                    return Ok(true);
                }
                let mut bigger = mu.clone();
                bigger.insert(w, a)?;
                if is_internally_stable(inst, &bigger)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    };
    let members = match class {
        MatchingClass::All => {
            let mut out = Vec::new();
            for mu in enumerate_matchings(inst, bound)? {
                if !can_grow(&mu, false)? {
                    out.push(mu);
                }
            }
            out
        }
        MatchingClass::InternallyStable => {
            let mut out = Vec::new();
            for mu in enumerate_internally_stable(inst, bound)? {
                if !can_grow(&mu, true)? {
                    out.push(mu);
                }
            }
            out
        }
        MatchingClass::Stable => enumerate_stable_matchings(inst, &Rational::zero(), bound)?,
        MatchingClass::EpsStable(eps) => enumerate_stable_matchings(inst, eps, bound)?,
    };
    if members.is_empty() {
        return Err(Error::EmptyClass);
    }
    Ok(members)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatioValue {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for RatioValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioValue::Finite(r) => write!(f, "{r}"),
            RatioValue::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioResult {
    pub class: MatchingClass,
    pub weights: Vec<Rational>,
    /// Largest `t` such that some distribution gives every weighted worker
    /// at least `t · weight`.
    pub t: Rational,
    pub ratio: RatioValue,
    pub witness: MatchingDistribution,
    /// Expected utilities under the witness.
    pub utilities: Vec<Rational>,
}

impl RatioResult {
    /// `max_w weight(w) / U_D(w)` recomputed from the witness.
    pub fn witness_ratio(&self) -> RatioValue {
        let mut worst: Option<Rational> = None;
        for (c, u) in self.weights.iter().zip(&self.utilities) {
            if !c.is_positive() {
                continue;
            }
            if u.is_zero() {
                return RatioValue::Infinite;
            }
            let r = c / u;
            if worst.as_ref().is_none_or(|x| r > *x) {
                worst = Some(r);
            }
        }
        RatioValue::Finite(worst.unwrap_or_else(Rational::one))
    }
}

struct Columns {
    members: Vec<Matching>,
    /// `values[w][k]` is the utility of worker `w` in member `k`.
    values: Vec<Vec<Rational>>,
}

impl Columns {
    fn new(inst: &MarketInstance, members: Vec<Matching>) -> Self {
        let values = (0..inst.n_workers())
            .map(|w| members.iter().map(|mu| inst.utility_of(w, mu.job_of(w))).collect())
            .collect();
        Self { members, values }
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    fn simplex_row(&self, lp: &mut LinearProgram) {
        let mut row = vec![Rational::one(); self.len()];
        row.resize(lp.n_vars(), Rational::zero());
        lp.add(row, Relation::Eq, Rational::one());
    }

    /// Maximizes `Σ_w gain(w) · U_D(w)` subject to `U_D(w) ≥ floor(w)`.
    fn best_above_floor(&self, floor: &[Rational], gain: &[Rational]) -> Result<(Vec<Rational>, Rational)> {
        let mut lp = LinearProgram::new(self.len());
        for (w, vals) in self.values.iter().enumerate() {
            if !gain[w].is_zero() {
                for (c, v) in lp.objective.iter_mut().zip(vals) {
                    *c += &gain[w] * v;
                }
            }
            if floor[w].is_positive() {
                lp.add(vals.clone(), Relation::Ge, floor[w].clone());
            }
        }
        self.simplex_row(&mut lp);
        match lp.solve() {
            LpOutcome::Optimal { x, value } => Ok((x, value)),
            other => Err(Error::Precondition(alloc::format!("floor program not solvable: {other:?}"))),
        }
    }

    fn distribution(&self, x: &[Rational]) -> Result<MatchingDistribution> {
        MatchingDistribution::merged(
            self.members.iter().zip(x).filter(|(_, p)| p.is_positive()).map(|(mu, p)| (mu.clone(), p.clone())),
        )
    }
}

/// Solves `max t` s.t. some distribution over `class` gives every worker
/// with positive weight at least `t · weight(w)`.
///
/// Among the optimal distributions the witness maximizes
/// `Σ_w U_D(w) / weight(w)`, so no worker can gain without another
/// dropping below the floor. With no positively weighted worker the ratio
/// is reported as 1.
pub fn maxmin_distribution(
    inst: &MarketInstance,
    class: &MatchingClass,
    weights: &[Rational],
    bound: EnumBound,
) -> Result<RatioResult> {
    if weights.len() != inst.n_workers() {
        return Err(Error::Shape(alloc::format!(
            "{} weights for {} workers",
            weights.len(),
            inst.n_workers()
        )));
    }
    if weights.iter().any(Signed::is_negative) {
        return Err(Error::InvalidParameter("weights must be non-negative".into()));
    }
    let cols = Columns::new(inst, class_members(inst, class, bound)?);
    let positive: Vec<usize> = (0..inst.n_workers()).filter(|&w| weights[w].is_positive()).collect();

    let t = if positive.is_empty() {
        Rational::one()
    } else {
        // variables: p_1..p_K, t
        let k = cols.len();
        let mut lp = LinearProgram::new(k + 1);
        lp.objective[k] = Rational::one();
        for &w in &positive {
            let mut row: Vec<Rational> = cols.values[w].iter().map(|v| -v).collect();
            row.push(weights[w].clone());
            lp.add(row, Relation::Le, Rational::zero());
        }
        cols.simplex_row(&mut lp);
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => value,
            other => return Err(Error::Precondition(alloc::format!("max-min program not solvable: {other:?}"))),
        }
    };

    let floor: Vec<Rational> = weights.iter().map(|c| if positive.is_empty() { Rational::zero() } else { c * &t }).collect();
    let gain: Vec<Rational> =
        weights.iter().map(|c| if c.is_positive() { c.recip() } else { Rational::zero() }).collect();
    let (x, _) = cols.best_above_floor(&floor, &gain)?;
    let witness = cols.distribution(&x)?;
    let utilities = witness.expected_utilities(inst)?;
    let ratio = if t.is_zero() { RatioValue::Infinite } else { RatioValue::Finite(t.recip()) };
    Ok(RatioResult { class: class.clone(), weights: weights.to_vec(), t, ratio, witness, utilities })
}

/// [`maxmin_distribution`] weighted by the optimal stable shares.
pub fn oss_ratio(inst: &MarketInstance, class: &MatchingClass, bound: EnumBound) -> Result<RatioResult> {
    let shares = oss(inst, &Rational::zero(), bound)?;
    maxmin_distribution(inst, class, &shares, bound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaStar {
    pub oss: Vec<Rational>,
    /// The class-M max-min solution fixing the common floor.
    pub floor: RatioResult,
    pub alpha: Vec<Rational>,
    /// `alpha(w) · OSS(w)`.
    pub benchmark: Vec<Rational>,
}

/// Per-worker best approximation factor compatible with the class-M floor.
///
/// `alpha(w)` is the largest `U_D(w) / OSS(w)` over distributions that give
/// every worker at least `OSS(v) / R_M`, capped at 1. Workers with zero
/// share get `alpha = 1`.
pub fn alpha_star(inst: &MarketInstance, bound: EnumBound) -> Result<AlphaStar> {
    let shares = oss(inst, &Rational::zero(), bound)?;
    let floor_solution = maxmin_distribution(inst, &MatchingClass::All, &shares, bound)?;
    let cols = Columns::new(inst, class_members(inst, &MatchingClass::All, bound)?);
    let floor: Vec<Rational> = shares.iter().map(|c| c * &floor_solution.t).collect();
    let mut alpha = Vec::with_capacity(shares.len());
    for (w, share) in shares.iter().enumerate() {
        if !share.is_positive() {
            alpha.push(Rational::one());
            continue;
        }
        let mut gain = vec![Rational::zero(); shares.len()];
        gain[w] = share.recip();
        let (_, value) = cols.best_above_floor(&floor, &gain)?;
        alpha.push(if value > Rational::one() { Rational::one() } else { value });
    }
    let benchmark = alpha.iter().zip(&shares).map(|(a, s)| a * s).collect();
    Ok(AlphaStar { oss: shares, floor: floor_solution, alpha, benchmark })
}
