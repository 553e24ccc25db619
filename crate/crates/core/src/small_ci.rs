//! Candidates for optima whose critical index `K` is at most `L`.
//!
//! The tail `(w_K..w_n)` is regular, so its sum is close in distribution to
//! a sample of its own draws. Each granular tail is summarised by
//!
//! ```text
//! A = sum j a,   B = sum j^2 (a/g - a^2),   C = sum j,   D = sum j^2,   E = max j
//! ```
//!
//! with `w = j kappa`, `p = a g` and `g = epsilon/(4n)`. `B` is kept as
//! `Q B` where `Q` is the denominator of `1/g`, which makes it an integer.
//! Regular tails (`E^2 <= eps'^2 D`) get a head from [`find_best_head`]
//! against a sample of their sum.

use std::collections::HashSet;

use log::debug;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::config::{Mode, SolverConfig};
use crate::error::{Error, Result};
use crate::head::{find_best_head, HeadSearch, HeadSolution};
use crate::large_ci::{estimate_states, guard_states, kappa_units};
use crate::model::{ProblemInstance, WeightVector};
use crate::pool::{Candidate, CandidatePool, Provenance};
use crate::rational::{ceil_half_power, int, to_f64, Rational};
use crate::sampling::{sample_tail_empirical, stream};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailQuintuple {
    pub a: u64,
    /// `Q B`, see [`variance_scale`].
    pub b_scaled: u128,
    pub c: u64,
    pub d: u64,
    pub e: u64,
    pub kappa: Rational,
    /// Multiples of `kappa` for coordinates `K..n`.
    pub units: Vec<u64>,
}

impl TailQuintuple {
    pub fn witness(&self) -> Vec<Rational> {
        self.units.iter().map(|&j| int(j as i64) * &self.kappa).collect()
    }

    /// `E^2 <= eps'^2 D` with `D > 0`.
    pub fn is_regular(&self, eps_prime: &Rational) -> bool {
        self.d > 0 && int((self.e * self.e) as i64) <= eps_prime * eps_prime * int(self.d as i64)
    }
}

/// Denominator of `1/g`, the factor that makes `B` integral.
pub fn variance_scale(instance: &ProblemInstance) -> u64 {
    (Rational::one() / &instance.grid)
        .denom()
        .to_u64()
        .expect("grid denominator fits in 64 bits")
}

/// `epsilon gamma^2 / (200 (ceil((L+2)^{(L+2)/2}) + 1)^2 n^3)`, or the
/// practical override.
pub fn case3_kappa(instance: &ProblemInstance, l: usize, config: &SolverConfig) -> Result<Rational> {
    let kappa = match (&config.mode, &config.kappa_override) {
        (Mode::Practical, Some(k)) => k.clone(),
        _ => {
            let n = BigInt::from(instance.n() as u64);
            let power = ceil_half_power(l as u64 + 2, l as u32 + 2) + 1;
            let den = Rational::from(BigInt::from(200) * &power * &power * &n * &n * &n);
            &instance.epsilon * &instance.gamma * &instance.gamma / den
        }
    };
    let m = kappa_units(&kappa);
    let estimate = estimate_states(instance.n(), m, f64::INFINITY);
    debug!("case-3 kappa = {kappa}, estimated tail summaries {estimate:.3e}");
    guard_states("small-critical-index tail table", estimate, config.state_space_limit)?;
    Ok(kappa)
}

type Key = (u64, u128, u64, u64, u64);

/// Every reachable `(A, QB, C, D, E)` for tails on coordinates `k..n`
/// (1-based) with `C kappa <= 1`, each with its first witness in the order
/// (coordinate ascending, multiple ascending).
pub fn construct_achievable_quintuples(
    instance: &ProblemInstance,
    k: usize,
    kappa: &Rational,
    state_limit: u64,
) -> Result<Vec<TailQuintuple>> {
    if k == 0 || k > instance.n() {
        return Err(Error::InvalidInput(format!("tail start {k} outside 1..={}", instance.n())));
    }
    let n = instance.n();
    let m = kappa_units(kappa);
    let inv_g = Rational::one() / &instance.grid;
    let (num, den) = (
        inv_g.numer().to_u64().expect("grid fits"),
        inv_g.denom().to_u64().expect("grid fits"),
    );
    let mut layers: Vec<Vec<(Key, usize, u64)>> = vec![vec![((0, 0, 0, 0, 0), 0, 0)]];
    for t in k - 1..n {
        let a_t = instance.grid_units(t);
        // a (1/g) Q - a^2 Q, non-negative because p = a g <= 1.
        let spread = u128::from(a_t) * u128::from(num) - u128::from(a_t) * u128::from(a_t) * u128::from(den);
        let prev = layers.last().expect("initial layer");
        let mut seen: HashSet<Key> = HashSet::with_capacity(prev.len());
        let mut next = Vec::with_capacity(prev.len());
        for (pi, &((a, b, c, d, e), _, _)) in prev.iter().enumerate() {
            for j in 0..=m - c {
                let key = (a + j * a_t, b + u128::from(j * j) * spread, c + j, d + j * j, e.max(j));
                if seen.insert(key) {
                    next.push((key, pi, j));
                }
            }
        }
        if next.len() as u64 > state_limit {
            return Err(Error::guard(
                "small-critical-index tail table",
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
        .map(|(idx, &((a, b_scaled, c, d, e), _, _))| {
            let mut units = vec![0u64; last];
            let mut cur = idx;
            for layer in (1..=last).rev() {
                let (_, parent, j) = layers[layer][cur];
                units[layer - 1] = j;
                cur = parent;
            }
            TailQuintuple {
                a,
                b_scaled,
                c,
                d,
                e,
                kappa: kappa.clone(),
                units,
            }
        })
        .collect())
}

/// Regular non-zero tails, one per distinct `(A, QB, C)`.
pub fn construct_achievable_regular_tails(
    instance: &ProblemInstance,
    k: usize,
    kappa: &Rational,
    eps_prime: &Rational,
    state_limit: u64,
) -> Result<Vec<TailQuintuple>> {
    let mut seen = HashSet::new();
    Ok(construct_achievable_quintuples(instance, k, kappa, state_limit)?
        .into_iter()
        .filter(|q| q.is_regular(eps_prime) && seen.insert((q.a, q.b_scaled, q.c)))
        .collect())
}

/// `ceil(mc ln(1/delta') / eps'^2)`.
pub fn head_sample_size(mc_constant: &Rational, eps_prime: &Rational, delta_prime: &Rational) -> f64 {
    let e = to_f64(eps_prime);
    (to_f64(mc_constant) * (1.0 / to_f64(delta_prime)).ln() / (e * e)).ceil().max(1.0)
}

/// Head for coordinates `1..k-1` against `m` draws of the tail sum.
pub fn find_approximately_best_head(
    instance: &ProblemInstance,
    tail_weights: &[Rational],
    eps_prime: &Rational,
    delta_prime: &Rational,
    config: &SolverConfig,
    stream_id: u64,
) -> Result<HeadSolution> {
    let k = instance.n() - tail_weights.len() + 1;
    let m = head_sample_size(&config.mc_constant, eps_prime, delta_prime);
    if m > config.state_space_limit as f64 {
        return Err(Error::guard(
            "head sample",
            m,
            config.state_space_limit as f64,
            "lower --mc-constant or raise --state-space-limit",
        ));
    }
    let sample = sample_tail_empirical(&instance.probs[k - 1..], tail_weights, m as usize, config.seed, stream_id);
    let budget = Rational::one() - tail_weights.iter().sum::<Rational>();
    find_best_head(&instance.probs[..k - 1], &sample, &budget, &instance.theta, HeadSearch::Chain)
}

/// Stream for the head sample of tail `idx` at tail start `k`.
fn head_stream(k: usize, idx: usize) -> u64 {
    stream::HEAD_BASE + ((k as u64) << 24) + idx as u64
}

/// One candidate per tail, heads drawn with failure budget
/// `delta / (2 |tails|)` each.
pub fn heads_for_tails(
    instance: &ProblemInstance,
    k: usize,
    tails: &[TailQuintuple],
    delta: &Rational,
    config: &SolverConfig,
) -> Result<CandidatePool> {
    if tails.is_empty() {
        return Ok(CandidatePool::new());
    }
    let eps_prime = &instance.epsilon / int(200);
    let delta_prime = delta / int(2 * tails.len() as i64);
    let members = tails
        .par_iter()
        .enumerate()
        .map(|(idx, tail)| {
            let witness = tail.witness();
            let head =
                find_approximately_best_head(instance, &witness, &eps_prime, &delta_prime, config, head_stream(k, idx))?;
            Ok(Candidate::new(
                WeightVector::from_parts(head.weights, witness),
                Provenance::SmallCi { k },
                Some(idx),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CandidatePool { members })
}

pub fn find_near_opt_small_ci(
    instance: &ProblemInstance,
    k: usize,
    kappa: &Rational,
    delta: &Rational,
    config: &SolverConfig,
) -> Result<CandidatePool> {
    let eps_prime = &instance.epsilon * &instance.gamma / int(100);
    let tails = construct_achievable_regular_tails(instance, k, kappa, &eps_prime, config.state_space_limit)?;
    debug!("case 3, K = {k}: {} regular tails", tails.len());
    heads_for_tails(instance, k, &tails, delta, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::large_ci::case2_kappa;
    use crate::rational::rat;

    fn inst(probs: &[Rational]) -> ProblemInstance {
        ProblemInstance::new(probs.to_vec(), rat(1, 2), rat(1, 4), rat(1, 10)).unwrap()
    }

    #[test]
    fn kappa_override_and_theory_value() {
        let i = inst(&[rat(1, 2), rat(1, 4)]);
        assert_eq!(case3_kappa(&i, 1, &SolverConfig::practical(rat(1, 10), 1)).unwrap(), rat(1, 10));
        let mut cfg = SolverConfig::default();
        cfg.state_space_limit = u64::MAX;
        let k3 = case3_kappa(&i, 1, &cfg).unwrap();
        let k2 = case2_kappa(&i, 1, &cfg).unwrap();
        assert!(k3 < k2);
        // eps gamma^2 / (200 * 7^2 * 8)
        assert_eq!(k3, &i.epsilon * &i.gamma * &i.gamma / int(200 * 49 * 8));
    }

    #[test]
    fn theory_guard_trips_for_ten_nodes() {
        let i = inst(&vec![rat(1, 2); 10]);
        assert!(case3_kappa(&i, 3, &SolverConfig::default()).unwrap_err().is_guard());
    }

    #[test]
    fn single_slot_regularity() {
        let i = inst(&[rat(1, 2), rat(1, 2)]);
        let qs = construct_achievable_quintuples(&i, 2, &rat(1, 2), 100).unwrap();
        let half = qs.iter().find(|q| q.units == [1]).unwrap();
        assert_eq!((half.d, half.e), (1, 1));
        assert!(half.is_regular(&int(1)));
        assert!(!half.is_regular(&rat(99, 100)));
        assert!(!qs.iter().find(|q| q.units == [0]).unwrap().is_regular(&int(1)));
    }

    #[test]
    fn two_equal_slots() {
        let i = inst(&[rat(1, 2), rat(1, 2)]);
        let qs = construct_achievable_quintuples(&i, 1, &rat(1, 2), 100).unwrap();
        let q = qs.iter().find(|q| q.units == [1, 1]).unwrap();
        assert_eq!((q.d, q.e), (2, 1));
        assert!(q.is_regular(&rat(71, 100)));
        assert!(!q.is_regular(&rat(70, 100)));
    }

    #[test]
    fn summaries_match_their_witness() {
        let i = inst(&[rat(2, 3), rat(1, 2), rat(1, 4)]);
        let scale = variance_scale(&i);
        for q in construct_achievable_quintuples(&i, 1, &rat(1, 4), 1000).unwrap() {
            let w = q.witness();
            let kg = &q.kappa * &i.grid;
            let mean: Rational = w.iter().zip(&i.probs).map(|(w, p)| w * p).sum();
            let var: Rational = w.iter().zip(&i.probs).map(|(w, p)| w * w * p * (int(1) - p)).sum();
            assert_eq!(mean, int(q.a as i64) * &kg);
            assert_eq!(var * int(scale as i64), Rational::from(BigInt::from(q.b_scaled)) * &kg * &kg);
            assert_eq!(w.iter().sum::<Rational>(), int(q.c as i64) * &q.kappa);
            assert_eq!(*w.iter().max().unwrap(), int(q.e as i64) * &q.kappa);
        }
    }

    #[test]
    fn regular_tails_exclude_zero_and_dedupe() {
        let i = inst(&[rat(1, 2), rat(1, 2), rat(1, 2)]);
        let tails = construct_achievable_regular_tails(&i, 1, &rat(1, 4), &int(1), 1000).unwrap();
        assert!(tails.iter().all(|q| q.d > 0));
        let keys: HashSet<_> = tails.iter().map(|q| (q.a, q.b_scaled, q.c)).collect();
        assert_eq!(keys.len(), tails.len());
    }

    #[test]
    fn sample_size_formula() {
        assert_eq!(head_sample_size(&int(1), &rat(1, 10), &rat(1, 2)), 70.0);
    }

    #[test]
    fn heads_are_feasible_and_reproducible() {
        let i = inst(&[rat(2, 3), rat(1, 2), rat(1, 2)]);
        let mut cfg = SolverConfig::practical(rat(1, 4), 2);
        cfg.mc_constant = rat(1, 10_000);
        let tails = construct_achievable_quintuples(&i, 2, &rat(1, 4), 1000).unwrap();
        let a = heads_for_tails(&i, 2, &tails, &rat(1, 10), &cfg).unwrap();
        let b = heads_for_tails(&i, 2, &tails, &rat(1, 10), &cfg).unwrap();
        assert_eq!(a.len(), tails.len());
        assert!(a.all_feasible());
        for (x, y) in a.members.iter().zip(&b.members) {
            assert_eq!(x.weights, y.weights);
            assert_eq!(x.provenance, Provenance::SmallCi { k: 2 });
        }
    }

    #[test]
    fn no_regular_tails_means_empty_pool() {
        let i = inst(&[rat(1, 2), rat(1, 2)]);
        let pool = find_near_opt_small_ci(&i, 1, &rat(1, 4), &rat(1, 10), &SolverConfig::practical(rat(1, 4), 2)).unwrap();
        assert!(pool.is_empty());
    }
}
