//! Best head against a sampled tail.
//!
//! Given sample points `t_1..t_m` of the tail sum and a head budget `W`, find
//! `u >= 0` with `sum u <= W` maximizing `Pr[u . X + R >= theta]`, where `X`
//! is the head outcome and `R` is uniform over the sample.
//!
//! Any `u` induces, for each distinct sample value `t`, the upward-closed set
//! `{x : u . x >= theta - t}`. Sorted by increasing `t` these sets are
//! nested. [`HeadSearch::Chain`] runs a branch and bound over nested chains of
//! monotone halfspace sets and certifies each prefix with a feasibility
//! program. [`HeadSearch::Literal`] tries every tuple of halfspace sets, one
//! per sample point, and only runs on tiny inputs.
//!
//! Both programs carry membership constraints only. A feasible `u` scores at
//! least the probability of the chosen sets, and the optimum's own sets are
//! always feasible, so the best witness is optimal.

use log::trace;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::dist::EmpiricalDist;
use crate::error::{Error, Result};
use crate::halfspace::{enumerate_halfspace_sets, monotone_halfspace_sets, MAX_K};
use crate::junta::{find_optimal_junta, minimal_points, point_masses, set_probability, JuntaRequest};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use crate::rational::{int, Rational};

/// Literal enumeration refuses inputs with more tuples than this.
pub const MAX_LITERAL_PATTERNS: f64 = 2e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeadSearch {
    Chain,
    Literal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadSolution {
    pub weights: Vec<Rational>,
    /// `Pr[u . X + R >= theta]`, exact.
    pub value: Rational,
    pub programs_solved: usize,
}

/// `Pr[u . X + R >= theta]` with `R` uniform over the sample.
pub fn head_objective(head_probs: &[Rational], u: &[Rational], tail: &EmpiricalDist, theta: &Rational) -> Rational {
    let k = head_probs.len();
    let masses = point_masses(head_probs);
    let sums: Vec<Rational> = (0..1usize << k)
        .map(|x| (0..k).filter(|i| x >> i & 1 == 1).map(|i| &u[i]).sum())
        .collect();
    let m = int(tail.len() as i64);
    tail.counts()
        .iter()
        .map(|(t, c)| {
            let tau = theta - t;
            let pr: Rational = sums.iter().zip(&masses).filter(|(s, _)| **s >= tau).map(|(_, p)| p).sum();
            pr * int(*c as i64) / &m
        })
        .sum()
}

/// A point of `{0,1}^k` that must clear `tau`.
type Row = (u64, Rational);

fn witness_for(rows: &[Row], k: usize, budget: &Rational) -> Option<Vec<Rational>> {
    let mut lp = LinearProgram::new(k);
    for (x, tau) in rows {
        if *tau <= Rational::zero() {
            continue;
        }
        lp.add((0..k).map(|i| int(i64::from(x >> i & 1 == 1))).collect(), Relation::Ge, tau.clone());
    }
    lp.add(vec![int(1); k], Relation::Le, budget.clone());
    match lp_solve(&lp).expect("well-formed head program") {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

pub fn find_best_head(
    head_probs: &[Rational],
    tail: &EmpiricalDist,
    budget: &Rational,
    theta: &Rational,
    search: HeadSearch,
) -> Result<HeadSolution> {
    let k = head_probs.len();
    if k > MAX_K {
        return Err(Error::TooLarge(format!(
            "head of {k} coordinates exceeds the halfspace enumeration limit of {MAX_K}"
        )));
    }
    if *budget < Rational::zero() || *budget > Rational::one() {
        return Err(Error::InvalidInput(format!("head budget {budget} is outside [0, 1]")));
    }
    match search {
        HeadSearch::Chain => chain_search(head_probs, tail, budget, theta),
        HeadSearch::Literal => literal_search(head_probs, tail, budget, theta),
    }
}

struct Level {
    tau: Rational,
    share: Rational,
    /// Optimal single-level probability, an upper bound for any chain.
    cap: Rational,
}

struct ChainSearch<'a> {
    k: usize,
    budget: &'a Rational,
    levels: Vec<Level>,
    /// Monotone sets by decreasing probability.
    ranked: Vec<(Rational, u64)>,
    /// `rest[j]` bounds the contribution of levels `j..`.
    rest: Vec<Rational>,
    best: Option<(Rational, Vec<Rational>)>,
    head_probs: &'a [Rational],
    tail: &'a EmpiricalDist,
    theta: &'a Rational,
    programs: usize,
}

impl ChainSearch<'_> {
    fn best_value(&self) -> Option<&Rational> {
        self.best.as_ref().map(|(v, _)| v)
    }

    fn descend(&mut self, j: usize, below: u64, acc: Rational, rows: &mut Vec<Row>, point: Vec<Rational>) {
        if j == self.levels.len() {
            let value = head_objective(self.head_probs, &point, self.tail, self.theta);
            if self.best_value().is_none_or(|b| value > *b) {
                trace!("head chain improved to {value}");
                self.best = Some((value, point));
            }
            return;
        }
        let candidates: Vec<(Rational, u64)> = self
            .ranked
            .iter()
            .filter(|(p, mask)| mask & below == below && *p <= self.levels[j].cap)
            .cloned()
            .collect();
        for (p, mask) in candidates {
            let gained = &acc + &self.levels[j].share * &p;
            if let Some(b) = self.best_value() {
                if &gained + &self.rest[j + 1] <= *b {
                    break;
                }
            }
            let added = minimal_points(mask, self.k)
                .into_iter()
                .map(|x| (x, self.levels[j].tau.clone()))
                .collect::<Vec<_>>();
            let len = rows.len();
            rows.extend(added);
            self.programs += 1;
            if let Some(w) = witness_for(rows, self.k, self.budget) {
                self.descend(j + 1, mask, gained, rows, w);
            }
            rows.truncate(len);
        }
    }
}

fn chain_search(head_probs: &[Rational], tail: &EmpiricalDist, budget: &Rational, theta: &Rational) -> Result<HeadSolution> {
    let k = head_probs.len();
    let masses = point_masses(head_probs);
    let mut ranked: Vec<(Rational, u64)> = monotone_halfspace_sets(k)?
        .iter()
        .map(|s| (set_probability(s.mask, &masses), s.mask))
        .collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let m = int(tail.len() as i64);
    let levels = tail
        .counts()
        .par_iter()
        .map(|(t, c)| {
            let tau = theta - t;
            let cap = find_optimal_junta(&JuntaRequest {
                head_probs: head_probs.to_vec(),
                tau: tau.clone(),
                budget: budget.clone(),
            })?
            .value;
            Ok(Level {
                tau,
                share: int(*c as i64) / &m,
                cap,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rest = vec![Rational::zero(); levels.len() + 1];
    for j in (0..levels.len()).rev() {
        rest[j] = &rest[j + 1] + &levels[j].share * &levels[j].cap;
    }

    let mut search = ChainSearch {
        k,
        budget,
        levels,
        ranked,
        rest,
        best: None,
        head_probs,
        tail,
        theta,
        programs: 0,
    };
    search.descend(0, 0, Rational::zero(), &mut Vec::new(), vec![Rational::zero(); k]);
    let programs_solved = search.programs;
    let (value, weights) = search.best.expect("the all-empty chain is feasible");
    Ok(HeadSolution {
        weights,
        value,
        programs_solved,
    })
}

fn literal_search(head_probs: &[Rational], tail: &EmpiricalDist, budget: &Rational, theta: &Rational) -> Result<HeadSolution> {
    let k = head_probs.len();
    let sets = enumerate_halfspace_sets(k)?;
    let points: Vec<&Rational> = tail.points().collect();
    let m = points.len();
    let patterns = (sets.len() as f64).powi(m as i32);
    if patterns > MAX_LITERAL_PATTERNS {
        return Err(Error::TooLarge(format!(
            "literal head search over {patterns:.3e} set tuples (limit {MAX_LITERAL_PATTERNS:.0e})"
        )));
    }
    let total = sets.len().pow(m as u32);
    let best = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let mut rows = Vec::new();
            let mut rem = idx;
            for t in &points {
                let set = &sets[rem % sets.len()];
                rem /= sets.len();
                let tau = theta - *t;
                rows.extend(set.members().map(|x| (x, tau.clone())));
            }
            let w = witness_for(&rows, k, budget)?;
            Some((head_objective(head_probs, &w, tail, theta), idx, w))
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let (value, _, weights) = best.expect("the all-empty tuple is feasible");
    Ok(HeadSolution {
        weights,
        value,
        programs_solved: total,
    })
}
