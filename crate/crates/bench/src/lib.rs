//! Fixed workloads shared by the benchmarks.

use ftalloc_core::dist::EmpiricalDist;
use ftalloc_core::rational::{int, rat, Rational};
use ftalloc_core::SolverConfig;

pub struct SolveCase {
    pub name: &'static str,
    pub probs: Vec<Rational>,
    pub theta: Rational,
    pub epsilon: Rational,
    pub delta: Rational,
    pub config: SolverConfig,
}

pub fn solve_cases() -> Vec<SolveCase> {
    let practical = SolverConfig::practical(rat(1, 8), 2);
    vec![
        SolveCase {
            name: "n3_theta_half",
            probs: vec![rat(61, 100), rat(47, 100), rat(38, 100)],
            theta: rat(1, 2),
            epsilon: rat(1, 4),
            delta: rat(1, 20),
            config: practical.clone(),
        },
        SolveCase {
            name: "n4_theta_seven_tenths",
            probs: vec![rat(66, 100), rat(58, 100), rat(41, 100), rat(33, 100)],
            theta: rat(7, 10),
            epsilon: rat(1, 4),
            delta: rat(1, 20),
            config: practical.clone(),
        },
        SolveCase {
            name: "n8_coarse",
            probs: (0..8).map(|i| rat(70 - 4 * i, 100)).collect(),
            theta: rat(1, 2),
            epsilon: rat(1, 4),
            delta: rat(1, 20),
            config: SolverConfig::practical(rat(1, 4), 2),
        },
    ]
}

/// Head probabilities and a spread-out tail sample for the head search.
pub fn head_case(k: usize, points: usize) -> (Vec<Rational>, EmpiricalDist) {
    let probs = (0..k).map(|i| rat(7 - i as i64, 10)).collect();
    let tail = EmpiricalDist::new((0..points).map(|j| rat(j as i64, 2 * points as i64)).collect());
    (probs, tail)
}

pub fn uniform_weights(n: usize) -> Vec<Rational> {
    vec![int(1) / int(n as i64); n]
}
