//! End-to-end solver: preprocessing, the three candidate generators and the
//! Monte-Carlo selection of the final allocation.

use std::collections::BTreeMap;

use log::{debug, info};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::config::{Mode, SolverConfig};
use crate::error::Result;
use crate::eval::{objective_exact, EstimateKind, ObjectiveEstimate};
use crate::junta::{find_optimal_junta, JuntaRequest};
use crate::large_ci::{case2_kappa, find_near_opt_large_ci};
use crate::model::{compute_l, preprocess, Preprocessed, ProblemInstance, TrivialReason, WeightVector};
use crate::pool::{Candidate, CandidatePool, Provenance};
use crate::rational::{format_rational, int, to_f64, Rational};
use crate::sampling::{stream, OutcomeSample};
use crate::small_ci::{case3_kappa, find_near_opt_small_ci};

#[derive(Clone, Debug, Serialize)]
pub struct InstanceEcho {
    pub probs: Vec<String>,
    pub theta: String,
    pub epsilon: String,
    pub delta: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub mode: Mode,
    pub c_l: String,
    pub kappa: Option<String>,
    pub l_cap: Option<usize>,
    pub mc_constant: String,
    pub exact_eval_max_n: usize,
    pub state_space_limit: u64,
}

impl From<&SolverConfig> for ConfigEcho {
    fn from(c: &SolverConfig) -> Self {
        ConfigEcho {
            mode: c.mode,
            c_l: format_rational(&c.c_l),
            kappa: c.kappa_override.as_ref().map(format_rational),
            l_cap: c.l_cap,
            mc_constant: format_rational(&c.mc_constant),
            exact_eval_max_n: c.exact_eval_max_n,
            state_space_limit: c.state_space_limit,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CaseCounts {
    pub trivial: usize,
    pub junta: usize,
    /// Candidates per tail start `K`.
    pub small_ci: BTreeMap<usize, usize>,
    pub large_ci: usize,
}

/// Derived quantities of a non-trivial run.
#[derive(Clone, Debug, Serialize)]
pub struct Parameters {
    pub n: usize,
    pub gamma: String,
    pub grid: String,
    pub l: usize,
    pub kappa_large_ci: Option<String>,
    pub kappa_small_ci: Option<String>,
    pub selection_samples: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub instance: InstanceEcho,
    pub config: ConfigEcho,
    pub seed: u64,
    /// Chosen weights in the caller's coordinate order, exact.
    pub chosen: Vec<String>,
    pub chosen_f64: Vec<f64>,
    pub provenance: String,
    pub trivial_reason: Option<TrivialReason>,
    pub obj_estimate: ObjectiveEstimate,
    /// Exact objective under the caller's probabilities.
    pub obj_exact: Option<String>,
    pub obj_exact_f64: Option<f64>,
    pub pool_size: usize,
    pub case_counts: CaseCounts,
    pub parameters: Option<Parameters>,
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn chosen_weights(&self) -> Vec<Rational> {
        self.chosen
            .iter()
            .map(|s| crate::rational::parse_rational(s).expect("report weights are rationals"))
            .collect()
    }
}

/// `ceil(mc (1/eps^2) ln(pool / delta))`.
pub fn selection_sample_size(mc_constant: &Rational, epsilon: &Rational, delta: &Rational, pool: usize) -> u64 {
    let e = to_f64(epsilon);
    let m = to_f64(mc_constant) / (e * e) * (pool as f64 / to_f64(delta)).ln();
    m.ceil().max(1.0) as u64
}

pub fn solve(
    p_raw: &[Rational],
    theta: &Rational,
    epsilon: &Rational,
    delta: &Rational,
    config: &SolverConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let echo = InstanceEcho {
        probs: p_raw.iter().map(format_rational).collect(),
        theta: format_rational(theta),
        epsilon: format_rational(epsilon),
        delta: format_rational(delta),
    };
    let instance = match preprocess(p_raw, theta, epsilon, delta)? {
        Preprocessed::Trivial(t) => {
            info!("trivial instance: {:?}", t.reason);
            return Ok(SolveReport {
                instance: echo,
                config: config.into(),
                seed: config.seed,
                chosen: t.weights.weights.iter().map(format_rational).collect(),
                chosen_f64: t.weights.to_f64(),
                provenance: Provenance::Trivial.to_string(),
                trivial_reason: Some(t.reason),
                obj_estimate: ObjectiveEstimate::exact(&t.objective),
                obj_exact: Some(format_rational(&t.objective)),
                obj_exact_f64: Some(to_f64(&t.objective)),
                pool_size: 1,
                case_counts: CaseCounts {
                    trivial: 1,
                    ..CaseCounts::default()
                },
                parameters: None,
                notes: Vec::new(),
            });
        }
        Preprocessed::Instance(i) => i,
    };
    let n = instance.n();
    let l = compute_l(&instance, config);
    let mut notes = Vec::new();
    let mut counts = CaseCounts::default();

    let junta = find_optimal_junta(&JuntaRequest {
        head_probs: instance.probs[..l].to_vec(),
        tau: instance.theta.clone(),
        budget: Rational::one(),
    })?;
    let mut pool = CandidatePool::new();
    pool.push(Candidate::new(
        WeightVector::from_parts(junta.weights, vec![Rational::zero(); n - l]),
        Provenance::Junta,
        None,
    ));
    counts.junta = 1;

    let (mut kappa_large, mut kappa_small) = (None, None);
    if l < n {
        let k2 = case2_kappa(&instance, l, config)?;
        let k3 = case3_kappa(&instance, l, config)?;
        let per_k_delta = delta / int(2 * l as i64);
        let (small, large) = rayon::join(
            || {
                (1..=l)
                    .map(|k| find_near_opt_small_ci(&instance, k, &k3, &per_k_delta, config).map(|p| (k, p)))
                    .collect::<Result<Vec<_>>>()
            },
            || find_near_opt_large_ci(&instance, l, &k2, config),
        );
        for (k, p) in small? {
            counts.small_ci.insert(k, p.len());
            pool.extend(p);
        }
        let large = large?;
        counts.large_ci = large.len();
        pool.extend(large);
        kappa_large = Some(format_rational(&k2));
        kappa_small = Some(format_rational(&k3));
    } else {
        notes.push("head covers every coordinate (L = n); the junta candidate is exactly optimal for the rounded instance, tail cases skipped".into());
    }
    if counts.small_ci.values().all(|&c| c == 0) && l < n {
        notes.push("no regular tail summaries at this granularity; the small critical index case contributed no candidates".into());
    }
    debug!("candidate pool: {} members", pool.len());

    let m = selection_sample_size(&config.mc_constant, epsilon, delta, pool.len());
    let chosen = select(&instance, &mut pool, m, config.seed);
    let candidate = &pool.members[chosen];
    let weights = instance.to_original_order(&candidate.weights.weights);
    let exact = if n <= config.exact_eval_max_n {
        objective_exact(p_raw, &weights, theta, config.exact_eval_max_n).ok()
    } else {
        None
    };
    if exact.is_none() {
        notes.push("exact objective not computed; see obj_estimate".into());
    }
    Ok(SolveReport {
        instance: echo,
        config: config.into(),
        seed: config.seed,
        chosen_f64: weights.iter().map(to_f64).collect(),
        chosen: weights.iter().map(format_rational).collect(),
        provenance: candidate.provenance.to_string(),
        trivial_reason: None,
        obj_estimate: candidate.estimate.clone().expect("every member is estimated"),
        obj_exact: exact.as_ref().map(format_rational),
        obj_exact_f64: exact.as_ref().map(to_f64),
        pool_size: pool.len(),
        case_counts: counts,
        parameters: Some(Parameters {
            n,
            gamma: format_rational(&instance.gamma),
            grid: format_rational(&instance.grid),
            l,
            kappa_large_ci: kappa_large,
            kappa_small_ci: kappa_small,
            selection_samples: m,
        }),
        notes,
    })
}

/// Scores every member on one shared sample drawn from the caller's
/// (unrounded) probabilities and returns the index of the winner.
fn select(instance: &ProblemInstance, pool: &mut CandidatePool, m: u64, seed: u64) -> usize {
    let raw_sorted: Vec<Rational> = instance
        .original_index
        .iter()
        .map(|&i| instance.raw_probs[i].clone())
        .collect();
    let sample = OutcomeSample::draw(&raw_sorted, m as usize, seed, stream::SELECTION);
    for c in &mut pool.members {
        c.estimate = Some(sample.estimate(&c.weights.weights, &instance.theta));
    }
    let best = pool.best().expect("pool has the junta candidate");
    debug_assert_eq!(pool.members[best].estimate.as_ref().map(|e| e.kind), Some(EstimateKind::MonteCarlo));
    best
}
