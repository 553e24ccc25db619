//! Problem instances, preprocessing and derived parameters.

use log::debug;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::config::{Mode, SolverConfig};
use crate::error::{Error, Result};
use crate::rational::{int, to_f64, Rational};

/// A candidate allocation. Entries are exact rationals; estimation paths
/// convert with [`WeightVector::to_f64`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector {
    pub weights: Vec<Rational>,
    /// Index of the first tail coordinate (0-based), when the vector was
    /// assembled from a head and a tail.
    pub split_index: Option<usize>,
}

impl WeightVector {
    pub fn new(weights: Vec<Rational>) -> Self {
        WeightVector {
            weights,
            split_index: None,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![Rational::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut w = Self::zeros(n);
        w.weights[i] = Rational::one();
        w
    }

    pub fn from_parts(head: Vec<Rational>, tail: Vec<Rational>) -> Self {
        let split = head.len();
        let mut weights = head;
        weights.extend(tail);
        WeightVector {
            weights,
            split_index: Some(split),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn l1(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.weights.iter().all(|w| !w.is_negative()) && self.l1() <= Rational::one()
    }

    pub fn is_sorted_desc(&self) -> bool {
        self.weights.windows(2).all(|p| p[0] >= p[1])
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.weights.iter().map(to_f64).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ProblemInstance {
    /// Survival probabilities, sorted descending and on the `grid`.
    pub probs: Vec<Rational>,
    pub theta: Rational,
    pub epsilon: Rational,
    pub delta: Rational,
    /// `min(p_n, 1 - p_1)`.
    pub gamma: Rational,
    /// `epsilon / (4n)`.
    pub grid: Rational,
    /// `original_index[i]` is the caller's index of sorted coordinate `i`.
    pub original_index: Vec<usize>,
    /// Unrounded probabilities in the caller's order.
    pub raw_probs: Vec<Rational>,
}

impl ProblemInstance {
    /// Builds an instance from probabilities that already satisfy the
    /// sortedness and granularity assumptions.
    pub fn new(probs: Vec<Rational>, theta: Rational, epsilon: Rational, delta: Rational) -> Result<Self> {
        check_parameters(&theta, &epsilon, &delta)?;
        if theta.is_zero() || theta >= Rational::one() {
            return Err(Error::InvalidInput("theta must lie strictly between 0 and 1".into()));
        }
        if probs.is_empty() {
            return Err(Error::InvalidInput("no probabilities given".into()));
        }
        let n = probs.len();
        let grid = &epsilon / int(4 * n as i64);
        if !probs.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("probabilities must be sorted descending".into()));
        }
        for p in &probs {
            let units = p / &grid;
            if !units.is_integer() || !units.is_positive() {
                return Err(Error::InvalidInput(format!(
                    "probability {p} is not a positive multiple of epsilon/(4n) = {grid}"
                )));
            }
        }
        if probs[0] >= Rational::one() - &epsilon {
            return Err(Error::InvalidInput("largest probability must be below 1 - epsilon".into()));
        }
        let gamma = compute_gamma(&probs);
        Ok(ProblemInstance {
            raw_probs: probs.clone(),
            original_index: (0..n).collect(),
            probs,
            theta,
            epsilon,
            delta,
            gamma,
            grid,
        })
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    /// `p_i / grid` as an integer.
    pub fn grid_units(&self, i: usize) -> u64 {
        (&self.probs[i] / &self.grid)
            .to_integer()
            .to_u64()
            .expect("granular probability")
    }

    /// Maps a weight vector over the sorted coordinates back to the caller's
    /// coordinate order.
    pub fn to_original_order(&self, w: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); w.len()];
        for (i, v) in w.iter().enumerate() {
            out[self.original_index[i]] = v.clone();
        }
        out
    }
}

fn check_parameters(theta: &Rational, epsilon: &Rational, delta: &Rational) -> Result<()> {
    if theta.is_negative() || *theta > Rational::one() {
        return Err(Error::InvalidInput(format!("theta = {theta} is outside [0, 1]")));
    }
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(Error::InvalidInput(format!("epsilon = {epsilon} is outside (0, 1)")));
    }
    if !delta.is_positive() || *delta >= Rational::one() {
        return Err(Error::InvalidInput(format!("delta = {delta} is outside (0, 1)")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrivialReason {
    ThetaZero,
    ThetaOne,
    /// The most reliable node alone already succeeds with probability at
    /// least `1 - epsilon`.
    ReliableNode,
}

#[derive(Clone, Debug)]
pub struct TrivialSolution {
    /// Weights in the caller's coordinate order.
    pub weights: WeightVector,
    pub reason: TrivialReason,
    /// Exact objective of `weights` under the caller's probabilities.
    pub objective: Rational,
    /// Exactly optimal (true for the two threshold cases), as opposed to
    /// merely epsilon-optimal.
    pub optimal: bool,
}

#[derive(Clone, Debug)]
pub enum Preprocessed {
    Trivial(TrivialSolution),
    Instance(ProblemInstance),
}

/// Handles the degenerate thresholds, the reliable-node shortcut, and
/// otherwise sorts and rounds the probabilities down onto the
/// `epsilon/(4n)` grid.
pub fn preprocess(
    p_raw: &[Rational],
    theta: &Rational,
    epsilon: &Rational,
    delta: &Rational,
) -> Result<Preprocessed> {
    if p_raw.is_empty() {
        return Err(Error::InvalidInput("no probabilities given".into()));
    }
    check_parameters(theta, epsilon, delta)?;
    if let Some(p) = p_raw.iter().find(|p| p.is_negative() || **p > Rational::one()) {
        return Err(Error::InvalidInput(format!("probability {p} is outside [0, 1]")));
    }
    let n = p_raw.len();

    // Stable: ties keep the caller's order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p_raw[b].cmp(&p_raw[a]));
    let best = order[0];
    let p_max = p_raw[best].clone();

    let trivial = |reason, objective, optimal| {
        Ok(Preprocessed::Trivial(TrivialSolution {
            weights: WeightVector::unit(n, best),
            reason,
            objective,
            optimal,
        }))
    };
    if theta.is_zero() {
        return trivial(TrivialReason::ThetaZero, Rational::one(), true);
    }
    if *theta == Rational::one() {
        return trivial(TrivialReason::ThetaOne, p_max, true);
    }
    if p_max >= Rational::one() - epsilon {
        return trivial(TrivialReason::ReliableNode, p_max, false);
    }

    let grid = epsilon / int(4 * n as i64);
    let sorted: Vec<Rational> = order.iter().map(|&i| p_raw[i].clone()).collect();
    let probs = round_down_to_grid(&sorted, &grid);
    let gamma = compute_gamma(&probs);
    debug!("preprocessed {n} probabilities onto grid {grid}; gamma = {gamma}");
    Ok(Preprocessed::Instance(ProblemInstance {
        probs,
        theta: theta.clone(),
        epsilon: epsilon.clone(),
        delta: delta.clone(),
        gamma,
        grid,
        original_index: order,
        raw_probs: p_raw.to_vec(),
    }))
}

/// Rounds each probability down to a multiple of `grid`, clamping values
/// that would become zero up to one grid unit.
pub fn round_down_to_grid(probs: &[Rational], grid: &Rational) -> Vec<Rational> {
    probs
        .iter()
        .map(|p| {
            let units = (p / grid).floor();
            if units.is_zero() {
                grid.clone()
            } else {
                units * grid
            }
        })
        .collect()
}

/// `min(p_n, 1 - p_1)` for probabilities sorted descending.
pub fn compute_gamma(sorted_probs: &[Rational]) -> Rational {
    let last = sorted_probs.last().expect("non-empty").clone();
    let first = Rational::one() - &sorted_probs[0];
    last.min(first)
}

/// Unclamped cutoff value (natural logarithms), rounded up.
pub fn l_cutoff(eps: f64, gamma: f64, c_l: f64) -> f64 {
    let formula = c_l / (eps * eps * gamma * gamma) / gamma
        * (1.0 / (eps * gamma)).ln()
        * (1.0 / eps).ln();
    formula.ceil().max(1.0)
}

/// The head-size cutoff
/// `min(n, ceil(c_L * (1/(eps^2 gamma^2)) * (1/gamma) * ln(1/(eps gamma)) * ln(1/eps)))`,
/// further capped by `l_cap` in practical mode.
pub fn compute_l(instance: &ProblemInstance, config: &SolverConfig) -> usize {
    let n = instance.n();
    let uncapped = l_cutoff(
        to_f64(&instance.epsilon),
        to_f64(&instance.gamma),
        to_f64(&config.c_l),
    );
    let mut l = if uncapped >= n as f64 { n } else { uncapped as usize };
    if config.mode == Mode::Practical {
        if let Some(cap) = config.l_cap {
            l = l.min(cap);
        }
    }
    debug!("L: formula value {uncapped:.4e}, n = {n}, using L = {l}");
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn raw(v: &[f64]) -> Vec<Rational> {
        v.iter().map(|x| Rational::from_float(*x).unwrap()).collect()
    }

    fn instance(pre: Preprocessed) -> ProblemInstance {
        match pre {
            Preprocessed::Instance(i) => i,
            Preprocessed::Trivial(t) => panic!("unexpected trivial solution {t:?}"),
        }
    }

    #[test]
    fn theta_zero_is_trivial() {
        let pre = preprocess(&raw(&[0.9, 0.8]), &int(0), &rat(1, 10), &rat(1, 10)).unwrap();
        let Preprocessed::Trivial(t) = pre else { panic!() };
        assert_eq!(t.reason, TrivialReason::ThetaZero);
        assert_eq!(t.objective, int(1));
        assert!(t.weights.is_feasible());
    }

    #[test]
    fn theta_one_puts_all_weight_on_best_node() {
        let p = vec![rat(3, 10), rat(7, 10), rat(1, 2)];
        let Preprocessed::Trivial(t) = preprocess(&p, &int(1), &rat(1, 10), &rat(1, 10)).unwrap() else {
            panic!()
        };
        assert_eq!(t.reason, TrivialReason::ThetaOne);
        assert_eq!(t.weights.weights, vec![int(0), int(1), int(0)]);
        assert_eq!(t.objective, rat(7, 10));
    }

    #[test]
    fn reliable_node_shortcut() {
        let p = vec![rat(95, 100), rat(1, 2)];
        let pre = preprocess(&p, &rat(1, 2), &rat(5, 100), &rat(1, 10)).unwrap();
        let Preprocessed::Trivial(t) = pre else { panic!() };
        assert_eq!(t.reason, TrivialReason::ReliableNode);
        assert!(!t.optimal);
        assert_eq!(t.weights.weights, vec![int(1), int(0)]);
    }

    #[test]
    fn rounds_down_to_grid() {
        let sorted = vec![rat(87, 100), rat(61, 100)];
        assert_eq!(round_down_to_grid(&sorted, &rat(1, 40)), vec![rat(85, 100), rat(60, 100)]);
    }

    #[test]
    fn sorts_and_rounds() {
        // 0.87 already clears 1 - epsilon at epsilon = 0.2, so use 0.1.
        let p = vec![rat(61, 100), rat(87, 100)];
        let inst = instance(preprocess(&p, &rat(1, 2), &rat(1, 10), &rat(1, 10)).unwrap());
        assert_eq!(inst.grid, rat(1, 80));
        assert_eq!(inst.probs, vec![rat(69, 80), rat(48, 80)]);
        assert_eq!(inst.original_index, vec![1, 0]);
        assert_eq!(inst.to_original_order(&[int(1), int(0)]), vec![int(0), int(1)]);
        assert_eq!(inst.gamma, rat(11, 80));
    }

    #[test]
    fn tiny_probabilities_clamp_to_one_grid_unit() {
        let p = vec![rat(1, 2), rat(1, 1000)];
        let inst = instance(preprocess(&p, &rat(1, 2), &rat(1, 5), &rat(1, 10)).unwrap());
        assert_eq!(inst.probs[1], rat(1, 40));
    }

    #[test]
    fn ties_keep_caller_order() {
        let p = vec![rat(1, 2), rat(3, 4), rat(1, 2)];
        let inst = instance(preprocess(&p, &rat(1, 2), &rat(1, 5), &rat(1, 10)).unwrap());
        assert_eq!(inst.original_index, vec![1, 0, 2]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = vec![rat(1, 2)];
        assert!(preprocess(&[], &rat(1, 2), &rat(1, 5), &rat(1, 10)).is_err());
        assert!(preprocess(&p, &rat(3, 2), &rat(1, 5), &rat(1, 10)).is_err());
        assert!(preprocess(&p, &rat(1, 2), &int(0), &rat(1, 10)).is_err());
        assert!(preprocess(&p, &rat(1, 2), &rat(1, 5), &int(1)).is_err());
        assert!(preprocess(&[rat(3, 2)], &rat(1, 2), &rat(1, 5), &rat(1, 10)).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(compute_gamma(&[rat(85, 100), rat(60, 100)]), rat(15, 100));
        assert_eq!(compute_gamma(&vec![rat(1, 2); 4]), rat(1, 2));
        assert_eq!(compute_gamma(&[rat(3, 4), rat(1, 4)]), rat(1, 4));
    }

    #[test]
    fn direct_construction_checks_assumptions() {
        let ok = ProblemInstance::new(vec![rat(1, 2), rat(1, 4)], rat(1, 2), rat(1, 4), rat(1, 10));
        assert!(ok.is_ok());
        // 0.3 is not a multiple of 1/16.
        assert!(ProblemInstance::new(vec![rat(3, 10)], rat(1, 2), rat(1, 4), rat(1, 10)).is_err());
        assert!(ProblemInstance::new(vec![rat(1, 4), rat(1, 2)], rat(1, 2), rat(1, 2), rat(1, 10)).is_err());
    }

    #[test]
    fn l_formula_and_caps() {
        // eps = gamma = 1/2: 16 * 2 * ln 4 * ln 2 = 30.75 -> 31.
        assert_eq!(l_cutoff(0.5, 0.5, 1.0), 31.0);
        assert_eq!(l_cutoff(0.5, 0.5, 2.0), 62.0);

        let small = ProblemInstance::new(vec![rat(1, 4); 3], rat(1, 2), rat(1, 2), rat(1, 10)).unwrap();
        assert_eq!(compute_l(&small, &SolverConfig::default()), 3);

        let ten = ProblemInstance::new(vec![rat(1, 4); 10], rat(1, 2), rat(1, 2), rat(1, 10)).unwrap();
        let cfg = SolverConfig::practical(rat(1, 8), 4);
        assert!(compute_l(&ten, &cfg) <= 4);
    }
}
