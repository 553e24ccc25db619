//! Ground truth for tiny instances and the uniform-split baseline.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::objective_exact;
use crate::halfspace::{MAX_FUNCTION_K, MAX_K};
use crate::junta::{find_optimal_junta, JuntaRequest};
use crate::rational::{int, rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    /// Halfspace sets from per-function separability tests.
    Functions,
    /// Halfspace sets from the integer weight grid (five coordinates). The
    /// grid reproduces the known count of 94572 sets.
    WeightGrid,
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub opt_value: Rational,
    /// Weights in the caller's coordinate order.
    pub witness: Vec<Rational>,
    pub sets_examined: usize,
    pub method: OracleMethod,
}

/// Exact optimum over all feasible allocations for `n <= 5`.
pub fn brute_force_optimum(probs: &[Rational], theta: &Rational) -> Result<OracleResult> {
    let n = probs.len();
    if n == 0 || n > MAX_K {
        return Err(Error::TooLarge(format!("the exact oracle covers 1..={MAX_K} nodes, got {n}")));
    }
    let sol = find_optimal_junta(&JuntaRequest {
        head_probs: probs.to_vec(),
        tau: theta.clone(),
        budget: Rational::one(),
    })?;
    Ok(OracleResult {
        opt_value: sol.value,
        witness: sol.weights,
        sets_examined: sol.sets_examined,
        method: if n <= MAX_FUNCTION_K {
            OracleMethod::Functions
        } else {
            OracleMethod::WeightGrid
        },
    })
}

#[derive(Clone, Debug)]
pub struct BaselineResult {
    pub best_k: usize,
    pub value: Rational,
    /// `per_k[k - 1]` is the value of the uniform `k`-split.
    pub per_k: Vec<Rational>,
    /// The best split, in the caller's coordinate order.
    pub weights: Vec<Rational>,
}

/// `1/k` on each of the `k` most reliable nodes, for every `k`.
pub fn uniform_split(probs: &[Rational], k: usize) -> Vec<Rational> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].cmp(&probs[a]));
    let mut w = vec![Rational::zero(); probs.len()];
    for &i in &order[..k] {
        w[i] = rat(1, k as i64);
    }
    w
}

pub fn uniform_split_baseline(probs: &[Rational], theta: &Rational) -> Result<BaselineResult> {
    let n = probs.len();
    if n == 0 {
        return Err(Error::InvalidInput("no probabilities given".into()));
    }
    let per_k = (1..=n)
        .map(|k| objective_exact(probs, &uniform_split(probs, k), theta, usize::MAX))
        .collect::<Result<Vec<_>>>()?;
    // First maximum: ties go to the smaller split.
    let (best, value) = per_k
        .iter()
        .enumerate()
        .fold((0, &per_k[0]), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    Ok(BaselineResult {
        best_k: best + 1,
        value: value.clone(),
        weights: uniform_split(probs, best + 1),
        per_k,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub probs: Vec<String>,
    pub theta: String,
    pub candidate: Vec<String>,
    pub candidate_value: String,
    pub uniform_values: Vec<String>,
    pub best_uniform_k: usize,
    pub best_uniform_value: String,
    pub pass: bool,
}

/// Five nodes of reliability 0.9 at `theta = 5/12`: the split
/// `(1/4, 1/4, 1/6, 1/6, 1/6)` beats every uniform split.
pub fn five_node_counterexample() -> Result<CounterexampleReport> {
    use crate::rational::format_rational as f;
    let probs = vec![rat(9, 10); 5];
    let theta = rat(5, 12);
    let candidate = vec![rat(1, 4), rat(1, 4), rat(1, 6), rat(1, 6), rat(1, 6)];
    let candidate_value = objective_exact(&probs, &candidate, &theta, 22)?;
    let base = uniform_split_baseline(&probs, &theta)?;
    let pass = candidate_value > base.value && candidate.iter().sum::<Rational>() == int(1);
    Ok(CounterexampleReport {
        probs: probs.iter().map(f).collect(),
        theta: f(&theta),
        candidate: candidate.iter().map(f).collect(),
        candidate_value: f(&candidate_value),
        uniform_values: base.per_k.iter().map(f).collect(),
        best_uniform_k: base.best_k,
        best_uniform_value: f(&base.value),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_oracle() {
        let r = brute_force_optimum(&[rat(7, 10)], &rat(1, 2)).unwrap();
        assert_eq!(r.opt_value, rat(7, 10));
        assert_eq!(r.method, OracleMethod::Functions);
    }

    #[test]
    fn two_fair_nodes_at_threshold_six_tenths() {
        // Both nodes together cannot reach 0.6 each, so only one node or
        // both-up can be targeted: the optimum is 1/2.
        let r = brute_force_optimum(&[rat(1, 2), rat(1, 2)], &rat(3, 5)).unwrap();
        assert_eq!(r.opt_value, rat(1, 2));
        assert_eq!(objective_exact(&[rat(1, 2), rat(1, 2)], &r.witness, &rat(3, 5), 22).unwrap(), r.opt_value);
    }

    #[test]
    fn theta_one_puts_everything_on_best_node() {
        let r = brute_force_optimum(&[rat(3, 5), rat(4, 5)], &int(1)).unwrap();
        assert_eq!(r.opt_value, rat(4, 5));
        assert_eq!(r.witness, vec![int(0), int(1)]);
    }

    #[test]
    fn uniform_splits_for_point_nine() {
        let b = uniform_split_baseline(&vec![rat(9, 10); 5], &rat(5, 12)).unwrap();
        assert_eq!(
            b.per_k,
            vec![rat(9, 10), rat(99, 100), rat(972, 1000), rat(9963, 10000), rat(99144, 100000)]
        );
        assert_eq!(b.best_k, 4);
    }

    #[test]
    fn tiny_threshold_needs_one_success() {
        let p = vec![rat(1, 2), rat(1, 3), rat(1, 4)];
        let b = uniform_split_baseline(&p, &rat(1, 100)).unwrap();
        assert_eq!(b.per_k[0], rat(1, 2));
        assert_eq!(b.per_k[2], int(1) - rat(1, 2) * rat(2, 3) * rat(3, 4));
    }

    #[test]
    fn counterexample_passes() {
        let r = five_node_counterexample().unwrap();
        assert!(r.pass);
        assert_eq!(r.candidate_value, "99711/100000");
        assert_eq!(r.best_uniform_value, "9963/10000");
        assert_eq!(r.best_uniform_k, 4);
    }
}
