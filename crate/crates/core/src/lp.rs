//! Exact two-phase simplex over rationals with Bland's pivoting rule.
//!
//! Sized for the share benchmarks: a handful of rows and up to a few
//! thousand columns. Dense tableau, no numerical tolerances.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective·x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self { objective: vec![Rational::zero(); n_vars], constraints: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        debug_assert_eq!(coeffs.len(), self.n_vars());
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve(&self.objective)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Column {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    n_vars: usize,
    kinds: Vec<Column>,
    /// Rows of `B⁻¹[A | b]`; the last entry of each row is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n_vars = lp.n_vars();
        let mut kinds = vec![Column::Structural; n_vars];
        let mut extra: Vec<(usize, Rational, Column)> = Vec::new();
        let mut normalized = Vec::with_capacity(lp.constraints.len());
        for (i, c) in lp.constraints.iter().enumerate() {
            let (coeffs, relation, rhs) = if c.rhs.is_negative() {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|x| -x).collect::<Vec<_>>(), flipped, -&c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs.clone())
            };
            match relation {
                Relation::Le => extra.push((i, Rational::one(), Column::Slack)),
                Relation::Ge => {
                    extra.push((i, -Rational::one(), Column::Slack));
                    extra.push((i, Rational::one(), Column::Artificial));
                }
                Relation::Eq => extra.push((i, Rational::one(), Column::Artificial)),
            }
            normalized.push((coeffs, rhs));
        }
        let width = n_vars + extra.len();
        let mut rows: Vec<Vec<Rational>> = normalized
            .into_iter()
            .map(|(mut coeffs, rhs)| {
                coeffs.resize(width, Rational::zero());
                coeffs.push(rhs);
                coeffs
            })
            .collect();
        let mut basis = vec![usize::MAX; rows.len()];
        for (k, (row, value, kind)) in extra.into_iter().enumerate() {
            let col = n_vars + k;
            kinds.push(kind);
            let positive = value.is_positive();
            rows[row][col] = value;
            if positive {
                basis[row] = col;
            }
        }
        Self { n_vars, kinds, rows, basis }
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        if !p.is_one() {
            for x in self.rows[row].iter_mut() {
                if !x.is_zero() {
                    *x /= &p;
                }
            }
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost·x` from the current feasible basis. Returns `false`
    /// if the objective is unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: impl Fn(Column) -> bool) -> bool {
        let rhs = self.width();
        loop {
            let entering = (0..self.width()).find(|&j| {
                allowed(self.kinds[j]) && !self.basis.contains(&j) && {
                    let mut reduced = cost[j].clone();
                    for (r, &b) in self.rows.iter().zip(&self.basis) {
                        if !r[j].is_zero() && !cost[b].is_zero() {
                            reduced -= &cost[b] * &r[j];
                        }
                    }
                    reduced.is_positive()
                }
            });
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                if !r[col].is_positive() {
                    continue;
                }
                let ratio = &r[rhs] / &r[col];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }

    fn solve(mut self, objective: &[Rational]) -> LpOutcome {
        let rhs = self.width();
        if self.kinds.contains(&Column::Artificial) {
            let phase1: Vec<Rational> = self
                .kinds
                .iter()
                .map(|&k| if k == Column::Artificial { -Rational::one() } else { Rational::zero() })
                .collect();
            self.optimize(&phase1, |_| true);
            let infeasibility: Rational = self
                .rows
                .iter()
                .zip(&self.basis)
                .filter(|(_, &b)| self.kinds[b] == Column::Artificial)
                .map(|(r, _)| r[rhs].clone())
                .sum();
            if infeasibility.is_positive() {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis; rows with no
            // other support are redundant.
            let mut i = 0;
            while i < self.rows.len() {
                if self.kinds[self.basis[i]] != Column::Artificial {
                    i += 1;
                    continue;
                }
                let replacement = (0..self.width())
                    .find(|&j| self.kinds[j] != Column::Artificial && !self.rows[i][j].is_zero());
                match replacement {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                    }
                }
            }
        }
        let mut cost = objective.to_vec();
        cost.resize(self.width(), Rational::zero());
        if !self.optimize(&cost, |k| k != Column::Artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); self.n_vars];
        for (r, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n_vars {
                x[b] = r[rhs].clone();
            }
        }
        let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}
