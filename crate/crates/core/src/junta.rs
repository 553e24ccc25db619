//! Exact optimisation of a head-only allocation.
//!
//! Any non-negative `w` induces the upward-closed halfspace set
//! `S = {x : w . x >= tau}`, so the optimum is the most probable such set
//! for which `{w >= 0, sum w <= W, w . x >= tau for x in S}` is feasible.
//! Sets are scanned by decreasing probability and the scan stops at the first
//! probability level with a feasible set.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::halfspace::{monotone_halfspace_sets, HalfspaceSet, MAX_K};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use crate::rational::{int, Rational};

#[derive(Clone, Debug)]
pub struct JuntaRequest {
    pub head_probs: Vec<Rational>,
    pub tau: Rational,
    pub budget: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JuntaSolution {
    pub weights: Vec<Rational>,
    /// `Pr[w . X >= tau]`, exact.
    pub value: Rational,
    pub set_mask: u64,
    /// Number of sets whose program was solved.
    pub sets_examined: usize,
}

/// Probability of each point of `{0,1}^k` under independent coordinates.
pub fn point_masses(probs: &[Rational]) -> Vec<Rational> {
    let k = probs.len();
    let mut masses = vec![Rational::one(); 1 << k];
    for (x, m) in masses.iter_mut().enumerate() {
        for (i, p) in probs.iter().enumerate() {
            if x >> i & 1 == 1 {
                *m *= p;
            } else {
                *m *= Rational::one() - p;
            }
        }
    }
    masses
}

pub fn set_probability(mask: u64, masses: &[Rational]) -> Rational {
    masses
        .iter()
        .enumerate()
        .filter(|(x, _)| mask >> x & 1 == 1)
        .map(|(_, m)| m)
        .sum()
}

/// Members of an upward-closed set with no member directly below them.
pub fn minimal_points(mask: u64, k: usize) -> Vec<u64> {
    (0..1u64 << k)
        .filter(|&x| mask >> x & 1 == 1 && (0..k).all(|i| x >> i & 1 == 0 || mask >> (x & !(1 << i)) & 1 == 0))
        .collect()
}

/// Some `w >= 0` with `sum w <= budget` and `w . x >= tau` on every member.
pub fn head_witness(mask: u64, k: usize, tau: &Rational, budget: &Rational) -> Option<Vec<Rational>> {
    let mut lp = LinearProgram::new(k);
    for x in minimal_points(mask, k) {
        let row = (0..k).map(|i| int(i64::from(x >> i & 1 == 1))).collect();
        lp.add(row, Relation::Ge, tau.clone());
    }
    lp.add(vec![int(1); k], Relation::Le, budget.clone());
    match lp_solve(&lp).expect("well-formed head program") {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

/// Descending copy, the key for deterministic tie-breaking.
pub fn sorted_key(w: &[Rational]) -> Vec<Rational> {
    let mut key = w.to_vec();
    key.sort_unstable_by(|a, b| b.cmp(a));
    key
}

pub fn find_optimal_junta(req: &JuntaRequest) -> Result<JuntaSolution> {
    let k = req.head_probs.len();
    if k > MAX_K {
        return Err(Error::TooLarge(format!(
            "head of {k} coordinates exceeds the halfspace enumeration limit of {MAX_K}"
        )));
    }
    if req.budget < Rational::zero() || req.budget > Rational::one() {
        return Err(Error::InvalidInput(format!("budget {} is outside [0, 1]", req.budget)));
    }
    let sets = monotone_halfspace_sets(k)?;
    let masses = point_masses(&req.head_probs);
    let mut ranked: Vec<(Rational, &HalfspaceSet)> =
        sets.iter().map(|s| (set_probability(s.mask, &masses), s)).collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.mask.cmp(&b.1.mask)));

    let mut examined = 0;
    let mut start = 0;
    while start < ranked.len() {
        let level = &ranked[start].0;
        let end = start + ranked[start..].iter().take_while(|(p, _)| p == level).count();
        examined += end - start;
        let feasible: Vec<(Vec<Rational>, u64)> = ranked[start..end]
            .par_iter()
            .filter_map(|(_, s)| head_witness(s.mask, k, &req.tau, &req.budget).map(|w| (w, s.mask)))
            .collect();
        if let Some((weights, mask)) = feasible.into_iter().min_by(|a, b| sorted_key(&a.0).cmp(&sorted_key(&b.0))) {
            return Ok(JuntaSolution {
                weights,
                value: level.clone(),
                set_mask: mask,
                sets_examined: examined,
            });
        }
        start = end;
    }
    unreachable!("the empty set is always feasible with w = 0")
}
