//! Exact evaluation of `Obj(w) = Pr[w . X >= theta]`.
//!
//! Two exact paths:
//! * grouping: coordinates sharing a weight are merged into a
//!   Poisson-binomial count, so vectors with few distinct weights (uniform
//!   splits, granular tails) evaluate exactly for any `n`;
//! * meet-in-the-middle enumeration over the non-zero coordinates, for up to
//!   `exact_eval_max_n` of them.
//!
//! The boundary `w . x == theta` counts as success everywhere.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::dist::DiscreteDist;
use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::rational::{int, to_f64, Rational};

/// Grouping is used while the joint count space stays below this many cells.
const MAX_GROUP_CELLS: f64 = 2_000_000.0;
pub const MAX_DISTINCT_WEIGHTS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObjectiveEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    /// Samples used; 0 for exact values.
    pub samples: u64,
    pub seed: Option<u64>,
}

impl ObjectiveEstimate {
    pub fn exact(value: &Rational) -> Self {
        ObjectiveEstimate {
            value: to_f64(value),
            kind: EstimateKind::Exact,
            samples: 0,
            seed: None,
        }
    }
}

/// Exact `Pr[w . X >= theta]` for independent `X_i ~ Bernoulli(probs[i])`.
pub fn objective_exact(
    probs: &[Rational],
    weights: &[Rational],
    theta: &Rational,
    max_n: usize,
) -> Result<Rational> {
    if probs.len() != weights.len() {
        return Err(Error::InvalidInput(format!(
            "{} probabilities but {} weights",
            probs.len(),
            weights.len()
        )));
    }
    let active: Vec<(Rational, Rational)> = weights
        .iter()
        .zip(probs)
        .filter(|(w, _)| !w.is_zero())
        .map(|(w, p)| (w.clone(), p.clone()))
        .collect();
    if active.is_empty() {
        return Ok(if *theta <= Rational::zero() { Rational::one() } else { Rational::zero() });
    }
    if let Some(groups) = group_by_weight(&active) {
        return Ok(grouped_law(&groups).mass_at_least(theta));
    }
    if active.len() <= max_n {
        return Ok(meet_in_the_middle(&active, theta));
    }
    Err(Error::TooLarge(format!(
        "{} non-zero weights with more than {MAX_DISTINCT_WEIGHTS} distinct values exceed the \
         enumeration limit of {max_n}",
        active.len()
    )))
}

/// Exact objective of `w` (sorted coordinates) on the instance's rounded
/// probabilities.
pub fn exact_objective(instance: &ProblemInstance, w: &[Rational], max_n: usize) -> Result<ObjectiveEstimate> {
    objective_exact(&instance.probs, w, &instance.theta, max_n).map(|v| ObjectiveEstimate::exact(&v))
}

/// Full law of `w . X` by grouped convolution. Intended for short vectors
/// or vectors with few distinct weights; the atom count can reach `2^n`.
pub fn linear_form_law(probs: &[Rational], weights: &[Rational]) -> DiscreteDist {
    let active: Vec<(Rational, Rational)> = weights
        .iter()
        .zip(probs)
        .filter(|(w, _)| !w.is_zero())
        .map(|(w, p)| (w.clone(), p.clone()))
        .collect();
    let mut groups: BTreeMap<Rational, Vec<Rational>> = BTreeMap::new();
    for (w, p) in active {
        groups.entry(w).or_default().push(p);
    }
    grouped_law(&groups.into_iter().collect::<Vec<_>>())
}

fn group_by_weight(active: &[(Rational, Rational)]) -> Option<Vec<(Rational, Vec<Rational>)>> {
    let mut groups: BTreeMap<Rational, Vec<Rational>> = BTreeMap::new();
    for (w, p) in active {
        groups.entry(w.clone()).or_default().push(p.clone());
    }
    if groups.len() > MAX_DISTINCT_WEIGHTS {
        return None;
    }
    let cells: f64 = groups.values().map(|ps| (ps.len() + 1) as f64).product();
    // A single coordinate per group is cheaper by enumeration.
    if cells > MAX_GROUP_CELLS || (groups.len() == active.len() && active.len() > 8) {
        return None;
    }
    Some(groups.into_iter().collect())
}

/// Distribution of the number of successes among independent Bernoullis.
pub fn poisson_binomial(probs: &[Rational]) -> Vec<Rational> {
    let mut dist = vec![Rational::one()];
    for p in probs {
        let q = Rational::one() - p;
        let mut next = vec![Rational::zero(); dist.len() + 1];
        for (c, mass) in dist.iter().enumerate() {
            next[c] += mass * &q;
            next[c + 1] += mass * p;
        }
        dist = next;
    }
    dist
}

fn grouped_law(groups: &[(Rational, Vec<Rational>)]) -> DiscreteDist {
    let mut law = DiscreteDist::point_mass(Rational::zero());
    for (w, ps) in groups {
        let counts = poisson_binomial(ps);
        let part = DiscreteDist::from_atoms(
            counts
                .into_iter()
                .enumerate()
                .map(|(c, m)| (w * int(c as i64), m)),
        );
        law = law.convolve(&part);
    }
    law
}

/// All subset sums of `coords` with their probabilities.
fn subset_sums(coords: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut out = vec![(Rational::zero(), Rational::one())];
    for (w, p) in coords {
        let q = Rational::one() - p;
        let mut next = Vec::with_capacity(out.len() * 2);
        for (s, m) in &out {
            next.push((s.clone(), m * &q));
            next.push((s + w, m * p));
        }
        out = next;
    }
    out
}

fn meet_in_the_middle(active: &[(Rational, Rational)], theta: &Rational) -> Rational {
    let (left, right) = active.split_at(active.len() / 2);
    let left = subset_sums(left);
    let mut right = subset_sums(right);
    right.sort_by(|a, b| a.0.cmp(&b.0));
    // suffix[i] = total mass of right[i..].
    let mut suffix = vec![Rational::zero(); right.len() + 1];
    for i in (0..right.len()).rev() {
        suffix[i] = &suffix[i + 1] + &right[i].1;
    }
    let mut total = Rational::zero();
    for (s, m) in &left {
        let need = theta - s;
        let start = right.partition_point(|(r, _)| *r < need);
        if !suffix[start].is_zero() {
            total += m * &suffix[start];
        }
    }
    total
}
