//! Seeded Monte-Carlo sampling of failure patterns.
//!
//! Generator: ChaCha8 (`rand_chacha`), seeded per chunk of `CHUNK` samples
//! from `(seed, stream, chunk index)` through a SplitMix64 mix. Chunks are
//! drawn in parallel and reduced in chunk order, so every result depends only
//! on the seed and never on the number of worker threads.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dist::EmpiricalDist;
use crate::eval::{EstimateKind, ObjectiveEstimate};
use crate::rational::{int, lcm_of_denominators, to_f64, Rational};

pub const CHUNK: usize = 4096;

/// Float sums this close to the threshold are re-checked exactly.
const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Independent streams carved out of one user seed.
pub mod stream {
    pub const SELECTION: u64 = 1;
    pub const MC_ESTIMATE: u64 = 2;
    /// Head sampling uses `HEAD_BASE + triple index`.
    pub const HEAD_BASE: u64 = 1 << 32;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ stream) ^ index)
}

fn chunk_ranges(m: usize) -> Vec<(usize, usize)> {
    (0..m.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(m)))
        .collect()
}

/// `m` outcome vectors `x in {0,1}^n`, bit-packed.
#[derive(Clone, Debug)]
pub struct OutcomeSample {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    m: usize,
    seed: u64,
}

impl OutcomeSample {
    pub fn draw(probs: &[Rational], m: usize, seed: u64, stream: u64) -> Self {
        let n = probs.len();
        let words = n.div_ceil(64).max(1);
        let pf: Vec<f64> = probs.iter().map(to_f64).collect();
        let chunks: Vec<Vec<u64>> = chunk_ranges(m)
            .into_par_iter()
            .enumerate()
            .map(|(c, (lo, hi))| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, stream, c as u64));
                let mut out = vec![0u64; (hi - lo) * words];
                for s in 0..hi - lo {
                    for (i, p) in pf.iter().enumerate() {
                        if rng.random::<f64>() < *p {
                            out[s * words + i / 64] |= 1 << (i % 64);
                        }
                    }
                }
                out
            })
            .collect();
        OutcomeSample {
            n,
            words,
            bits: chunks.concat(),
            m,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn get(&self, s: usize, i: usize) -> bool {
        self.bits[s * self.words + i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of samples with `w . x >= theta`.
    pub fn count_at_least(&self, w: &[Rational], theta: &Rational) -> u64 {
        assert_eq!(w.len(), self.n, "weight vector length does not match the sample");
        let wf: Vec<f64> = w.iter().map(to_f64).collect();
        let tf = to_f64(theta);
        let support: Vec<usize> = (0..self.n).filter(|&i| !w[i].is_zero()).collect();
        (0..self.m)
            .into_par_iter()
            .with_min_len(1024)
            .map(|s| {
                let sum: f64 = support.iter().filter(|&&i| self.get(s, i)).map(|&i| wf[i]).sum();
                if (sum - tf).abs() > BOUNDARY_TOLERANCE {
                    return u64::from(sum > tf);
                }
                let exact: Rational = support
                    .iter()
                    .filter(|&&i| self.get(s, i))
                    .map(|&i| &w[i])
                    .sum();
                u64::from(exact >= *theta)
            })
            .sum()
    }

    pub fn estimate(&self, w: &[Rational], theta: &Rational) -> ObjectiveEstimate {
        let hits = self.count_at_least(w, theta);
        ObjectiveEstimate {
            value: if self.m == 0 { 0.0 } else { hits as f64 / self.m as f64 },
            kind: EstimateKind::MonteCarlo,
            samples: self.m as u64,
            seed: Some(self.seed),
        }
    }
}

/// Fraction of `m` seeded draws `X ~ D_p` with `w . X >= theta`.
pub fn mc_estimate(probs: &[Rational], w: &[Rational], theta: &Rational, m: usize, seed: u64) -> ObjectiveEstimate {
    assert!(m >= 1, "need at least one sample");
    OutcomeSample::draw(probs, m, seed, stream::MC_ESTIMATE).estimate(w, theta)
}

/// `m` draws of `tail . X` as exact rationals, kept as value counts.
pub fn sample_tail_empirical(
    probs: &[Rational],
    tail: &[Rational],
    m: usize,
    seed: u64,
    stream: u64,
) -> EmpiricalDist {
    assert!(m >= 1, "need at least one sample");
    assert_eq!(probs.len(), tail.len());
    let den = lcm_of_denominators(tail);
    let scaled: Vec<Option<i64>> = tail.iter().map(|w| (w * Rational::from(den.clone())).to_integer().to_i64()).collect();
    let pf: Vec<f64> = probs.iter().map(to_f64).collect();
    let fits = scaled.iter().all(Option::is_some)
        && scaled.iter().map(|v| v.unwrap().unsigned_abs()).sum::<u64>() < i64::MAX as u64;

    let chunks: Vec<BTreeMap<Rational, u64>> = chunk_ranges(m)
        .into_par_iter()
        .enumerate()
        .map(|(c, (lo, hi))| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, stream, c as u64));
            let mut ints: BTreeMap<i64, u64> = BTreeMap::new();
            let mut out: BTreeMap<Rational, u64> = BTreeMap::new();
            for _ in lo..hi {
                if fits {
                    let mut acc = 0i64;
                    for (p, v) in pf.iter().zip(&scaled) {
                        if rng.random::<f64>() < *p {
                            acc += v.unwrap();
                        }
                    }
                    *ints.entry(acc).or_insert(0) += 1;
                } else {
                    let mut acc = int(0);
                    for (p, w) in pf.iter().zip(tail) {
                        if rng.random::<f64>() < *p {
                            acc += w;
                        }
                    }
                    *out.entry(acc).or_insert(0) += 1;
                }
            }
            for (v, c) in ints {
                *out.entry(Rational::new(BigInt::from(v), den.clone())).or_insert(0) += c;
            }
            out
        })
        .collect();
    EmpiricalDist::from_counts(chunks.into_iter().flatten())
}
