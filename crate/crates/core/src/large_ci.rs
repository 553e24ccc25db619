//! Candidates for optima whose critical index exceeds the head size `L`.
//!
//! The tail `(w_{L+1}..w_n)` is restricted to multiples of `kappa` and
//! summarised by the integer triple
//!
//! ```text
//! A = sum j_t^2,   B = sum j_t a_t,   C = sum j_t
//! ```
//!
//! where `w_t = j_t kappa` and `p_t = a_t epsilon/(4n)`, so that
//! `sum w^2 = A kappa^2`, `sum w p = B kappa epsilon/(4n)` and
//! `sum w = C kappa`. Every achievable triple gets a head from the junta
//! solver against a threshold shifted by the tail's mean and a deviation
//! allowance.

use std::collections::HashMap;

use log::debug;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::config::{Mode, SolverConfig};
use crate::error::{Error, Result};
use crate::junta::{find_optimal_junta, JuntaRequest};
use crate::model::{ProblemInstance, WeightVector};
use crate::pool::{Candidate, CandidatePool, Provenance};
use crate::rational::{ceil_half_power, int, to_f64, upper_bound_of, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailTriple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub kappa: Rational,
    /// Multiples of `kappa` for coordinates `L+1..n`.
    pub units: Vec<u64>,
}

impl TailTriple {
    pub fn witness(&self) -> Vec<Rational> {
        self.units.iter().map(|&j| int(j as i64) * &self.kappa).collect()
    }
}

/// Largest multiple count `floor(1 / kappa)`.
pub fn kappa_units(kappa: &Rational) -> u64 {
    (Rational::one() / kappa)
        .floor()
        .to_integer()
        .to_u64()
        .unwrap_or(u64::MAX)
}

/// Upper bound on the number of tail summaries for `slots` coordinates with
/// at most `m` units in total: the smaller of the number of unit
/// compositions and the size of the summary box.
pub(crate) fn estimate_states(slots: usize, m: u64, summary_box: f64) -> f64 {
    let mut compositions = 1.0f64;
    for i in 1..=slots as u64 {
        compositions *= (m + i) as f64 / i as f64;
        if compositions > 1e300 {
            break;
        }
    }
    compositions.min(summary_box)
}

pub(crate) fn guard_states(what: &str, estimate: f64, limit: u64) -> Result<()> {
    if estimate > limit as f64 {
        return Err(Error::guard(
            what,
            estimate,
            limit as f64,
            "use --mode practical with a coarser --kappa (e.g. 1/8) and a small --l-cap, \
             or raise --state-space-limit",
        ));
    }
    Ok(())
}

/// `1 / (n^2 (ceil((L+2)^{(L+2)/2}) + 1))`, or the practical override.
pub fn case2_kappa(instance: &ProblemInstance, l: usize, config: &SolverConfig) -> Result<Rational> {
    let kappa = match (&config.mode, &config.kappa_override) {
        (Mode::Practical, Some(k)) => k.clone(),
        _ => {
            let n = instance.n() as u64;
            let power = ceil_half_power(l as u64 + 2, l as u32 + 2);
            Rational::new(BigInt::one(), BigInt::from(n * n) * (power + 1))
        }
    };
    let m = kappa_units(&kappa);
    let slots = instance.n() - l;
    let estimate = estimate_states(slots, m, box_size(instance, m));
    debug!("case-2 kappa = {kappa}, estimated tail summaries {estimate:.3e}");
    guard_states("large-critical-index tail table", estimate, config.state_space_limit)?;
    Ok(kappa)
}

fn box_size(instance: &ProblemInstance, m: u64) -> f64 {
    let a_max = (0..instance.n()).map(|i| instance.grid_units(i)).max().unwrap_or(0) as f64;
    let m = m as f64;
    (m + 1.0) * (m * m + 1.0) * (m * a_max + 1.0)
}

/// Every `(A, B, C)` reachable by a `kappa`-granular tail on coordinates
/// `l+1..n` (1-based) with `C kappa <= 1`, each with its first witness in
/// the order (coordinate ascending, multiple ascending).
pub fn construct_achievable_tails(
    instance: &ProblemInstance,
    l: usize,
    kappa: &Rational,
    state_limit: u64,
) -> Result<Vec<TailTriple>> {
    let n = instance.n();
    let m = kappa_units(kappa);
    // (A, B, C) -> index in the current layer; parents point into the
    // previous layer.
    let mut layers: Vec<Vec<((u64, u64, u64), usize, u64)>> = vec![vec![((0, 0, 0), 0, 0)]];
    for t in l..n {
        let a_t = instance.grid_units(t);
        let prev = layers.last().expect("initial layer");
        let mut seen: HashMap<(u64, u64, u64), ()> = HashMap::with_capacity(prev.len());
        let mut next = Vec::with_capacity(prev.len());
        for (pi, &((a, b, c), _, _)) in prev.iter().enumerate() {
            for j in 0..=m - c {
                let key = (a + j * j, b + j * a_t, c + j);
                if seen.insert(key, ()).is_none() {
                    next.push((key, pi, j));
                }
            }
        }
        if next.len() as u64 > state_limit {
            return Err(Error::guard(
                "large-critical-index tail table",
                next.len() as f64,
                state_limit as f64,
                "use a coarser kappa or raise --state-space-limit",
            ));
        }
        layers.push(next);
    }
    let last = layers.len() - 1;
    Ok(layers[last]
        .iter()
        .enumerate()
        .map(|(idx, &((a, b, c), _, _))| {
            let mut units = vec![0u64; n - l];
            let mut cur = idx;
            for layer in (1..=last).rev() {
                let (_, parent, j) = layers[layer][cur];
                units[layer - 1] = j;
                cur = parent;
            }
            TailTriple {
                a,
                b,
                c,
                kappa: kappa.clone(),
                units,
            }
        })
        .collect())
}

/// `theta - B kappa g + kappa sqrt(ln(200/epsilon) A)`, with the square
/// root replaced by a rational upper bound.
pub fn shifted_threshold(instance: &ProblemInstance, triple: &TailTriple) -> Rational {
    let mean = int(triple.b as i64) * &triple.kappa * &instance.grid;
    let spread = if triple.a == 0 {
        Rational::zero()
    } else {
        let log = (200.0 / to_f64(&instance.epsilon)).ln();
        upper_bound_of((log * triple.a as f64).sqrt())
    };
    &instance.theta - mean + &triple.kappa * spread
}

pub fn find_near_opt_large_ci(
    instance: &ProblemInstance,
    l: usize,
    kappa: &Rational,
    config: &SolverConfig,
) -> Result<CandidatePool> {
    if l >= instance.n() {
        return Err(Error::InvalidInput(format!(
            "large critical index needs L < n (L = {l}, n = {})",
            instance.n()
        )));
    }
    let triples = construct_achievable_tails(instance, l, kappa, config.state_space_limit)?;
    debug!("case 2: {} achievable tail triples", triples.len());
    let head_probs = instance.probs[..l].to_vec();
    let members = triples
        .par_iter()
        .enumerate()
        .map(|(idx, triple)| {
            let head = find_optimal_junta(&JuntaRequest {
                head_probs: head_probs.clone(),
                tau: shifted_threshold(instance, triple),
                budget: Rational::one() - int(triple.c as i64) * kappa,
            })?;
            Ok(Candidate::new(
                WeightVector::from_parts(head.weights, triple.witness()),
                Provenance::LargeCi,
                Some(idx),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CandidatePool { members })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn inst(probs: &[Rational], eps: Rational) -> ProblemInstance {
        ProblemInstance::new(probs.to_vec(), rat(1, 2), eps, rat(1, 10)).unwrap()
    }

    #[test]
    fn theory_kappa_for_two_nodes() {
        let i = inst(&[rat(1, 2), rat(1, 4)], rat(1, 4));
        let k = case2_kappa(&i, 1, &SolverConfig::default()).unwrap();
        // ceil(3^{3/2}) = 6, so 1/(4 * 7).
        assert_eq!(k, rat(1, 28));
    }

    #[test]
    fn practical_override_and_guard() {
        let i = inst(&[rat(1, 2), rat(1, 4)], rat(1, 4));
        let cfg = SolverConfig::practical(rat(1, 20), 1);
        assert_eq!(case2_kappa(&i, 1, &cfg).unwrap(), rat(1, 20));
        let mut tight = cfg.clone();
        tight.state_space_limit = 5;
        assert!(case2_kappa(&i, 1, &tight).unwrap_err().is_guard());
    }

    #[test]
    fn two_slot_projection() {
        // n = 3, L = 1, tail probabilities 1/2 on the grid 1/48.
        let i = inst(&[rat(1, 2), rat(1, 2), rat(1, 2)], rat(1, 4));
        let triples = construct_achievable_tails(&i, 1, &rat(1, 2), 1000).unwrap();
        let mut ac: Vec<(u64, u64)> = triples.iter().map(|t| (t.a, t.c)).collect();
        ac.sort_unstable();
        ac.dedup();
        assert_eq!(ac, vec![(0, 0), (1, 1), (2, 2), (4, 2)]);
        for t in &triples {
            let w = t.witness();
            assert_eq!(w.iter().map(|x| x * x).sum::<Rational>(), int(t.a as i64) * &t.kappa * &t.kappa);
            assert_eq!(w.iter().sum::<Rational>(), int(t.c as i64) * &t.kappa);
        }
    }

    #[test]
    fn empty_tail_has_only_the_zero_triple() {
        let i = inst(&[rat(1, 2), rat(1, 4)], rat(1, 4));
        let triples = construct_achievable_tails(&i, 2, &rat(1, 4), 100).unwrap();
        assert_eq!(triples.len(), 1);
        assert_eq!((triples[0].a, triples[0].b, triples[0].c), (0, 0, 0));
    }

    #[test]
    fn zero_triple_degenerates_to_the_junta() {
        let i = inst(&[rat(1, 2), rat(3, 8), rat(1, 4)], rat(1, 4));
        let zero = TailTriple {
            a: 0,
            b: 0,
            c: 0,
            kappa: rat(1, 4),
            units: vec![0, 0],
        };
        assert_eq!(shifted_threshold(&i, &zero), i.theta);
        let pool = find_near_opt_large_ci(&i, 1, &rat(1, 4), &SolverConfig::practical(rat(1, 4), 1)).unwrap();
        assert!(pool.all_feasible());
        let first = &pool.members[0];
        assert_eq!(first.tail_index, Some(0));
        assert_eq!(first.weights.weights[1..], [int(0), int(0)]);
        assert!(first.weights.weights[0] >= rat(1, 2));
    }
}
