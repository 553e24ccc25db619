//! Enumeration of the subsets of `{0,1}^k` cut out by a halfspace.
//!
//! A point `x` is encoded as the integer whose bit `i` is `x_{i+1}`, and a
//! set as the `2^k`-bit mask of its members.
//!
//! Two independent methods:
//! * **functions** (`k <= 4`): every Boolean function is tested for linear
//!   separability by an exact LP, after discarding functions that are not
//!   unate (those can never be separable);
//! * **weight grid** (`k <= 5`): sweep integer weights in `[-B, B]^k` and
//!   every useful threshold, deduplicating by mask.

use std::sync::OnceLock;

use num_integer::Integer;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use crate::rational::{int, lcm_of_denominators, Rational};

pub const MAX_FUNCTION_K: usize = 4;
pub const MAX_K: usize = 5;
/// Weight bound for the grid sweep. Every threshold function of up to five
/// variables has an integer realisation with weights of at most this size.
pub const GRID_BOUND: i64 = 5;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfspaceSet {
    pub k: usize,
    pub u: Vec<i64>,
    pub c: i64,
    pub mask: u64,
}

impl HalfspaceSet {
    pub fn contains(&self, x: u64) -> bool {
        self.mask >> x & 1 == 1
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        (0..1u64 << self.k).filter(|&x| self.contains(x))
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// Closed upwards: `x` in the set implies every `y >= x` is too.
    pub fn is_monotone(&self) -> bool {
        is_monotone_mask(self.mask, self.k)
    }

    /// Recomputes the mask from `(u, c)`.
    pub fn realized_mask(&self) -> u64 {
        mask_of(&self.u, self.c)
    }
}

pub fn point_bits(x: u64, k: usize) -> impl Iterator<Item = bool> {
    (0..k).map(move |i| x >> i & 1 == 1)
}

fn mask_of(u: &[i64], c: i64) -> u64 {
    let k = u.len();
    let mut mask = 0;
    for x in 0..1u64 << k {
        let s: i64 = point_bits(x, k).zip(u).filter(|(b, _)| *b).map(|(_, w)| w).sum();
        if s >= c {
            mask |= 1 << x;
        }
    }
    mask
}

pub fn is_monotone_mask(mask: u64, k: usize) -> bool {
    (0..1u64 << k).all(|x| {
        mask >> x & 1 == 0 || (0..k).all(|i| mask >> (x | 1 << i) & 1 == 1)
    })
}

/// Every variable acts in one direction only.
fn is_unate(mask: u64, k: usize) -> bool {
    (0..k).all(|i| {
        let (mut up, mut down) = (false, false);
        for x in (0..1u64 << k).filter(|x| x >> i & 1 == 0) {
            let (lo, hi) = (mask >> x & 1, mask >> (x | 1 << i) & 1);
            up |= lo < hi;
            down |= lo > hi;
        }
        !(up && down)
    })
}

/// Exact separability test. Returns an integral `(u, c)` realising `mask`.
pub fn separate(mask: u64, k: usize) -> Option<(Vec<i64>, i64)> {
    // Variables u_1..u_k, c, all free.
    let mut lp = LinearProgram::new(k + 1);
    for v in 0..=k {
        lp.set_free(v);
    }
    for x in 0..1u64 << k {
        let mut row: Vec<Rational> = point_bits(x, k).map(|b| int(i64::from(b))).collect();
        row.push(int(-1));
        if mask >> x & 1 == 1 {
            lp.add(row, Relation::Ge, int(0));
        } else {
            lp.add(row, Relation::Le, int(-1));
        }
    }
    match lp_solve(&lp).expect("well-formed separability program") {
        LpOutcome::Optimal { point, .. } => {
            let scale = Rational::from(lcm_of_denominators(&point));
            let ints: Vec<BigInt> = point.iter().map(|v| (v * &scale).to_integer()).collect();
            let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
            let g = if g.is_zero() { BigInt::from(1) } else { g };
            let ints: Vec<i64> = ints.iter().map(|v| (v / &g).to_i64().expect("small weights")).collect();
            let c = ints[k];
            Some((ints[..k].to_vec(), c))
        }
        _ => None,
    }
}

/// All separable functions by per-function LP tests.
pub fn enumerate_by_functions(k: usize) -> Result<Vec<HalfspaceSet>> {
    if k > MAX_FUNCTION_K {
        return Err(Error::TooLarge(format!(
            "function enumeration supports k <= {MAX_FUNCTION_K}, got {k}"
        )));
    }
    let total = 1u64 << (1u64 << k);
    let candidates: Vec<u64> = (0..total).filter(|&m| is_unate(m, k)).collect();
    Ok(candidates
        .into_par_iter()
        .filter_map(|mask| {
            separate(mask, k).map(|(u, c)| HalfspaceSet { k, u, c, mask })
        })
        .collect())
}

/// All separable functions reachable with integer weights in `[-bound, bound]`,
/// in order of first appearance, sorted by mask at the end.
pub fn enumerate_by_weight_grid(k: usize, bound: i64) -> Result<Vec<HalfspaceSet>> {
    if k > MAX_K {
        return Err(Error::TooLarge(format!("weight-grid enumeration supports k <= {MAX_K}, got {k}")));
    }
    let side = (2 * bound + 1) as u64;
    let count = side.pow(k as u32);
    let decode = |mut idx: u64| -> Vec<i64> {
        (0..k)
            .map(|_| {
                let v = (idx % side) as i64 - bound;
                idx /= side;
                v
            })
            .collect()
    };
    // Each weight vector contributes the sets {x : u.x >= c} for c at every
    // attained value plus one above the maximum (the empty set).
    let found: Vec<(u64, Vec<i64>, i64)> = (0..count)
        .into_par_iter()
        .flat_map_iter(|idx| {
            let u = decode(idx);
            let mut sums: Vec<(i64, u64)> = (0..1u64 << k)
                .map(|x| (point_bits(x, k).zip(&u).filter(|(b, _)| *b).map(|(_, w)| w).sum(), x))
                .collect();
            sums.sort_unstable_by(|a, b| b.cmp(a));
            let mut out = Vec::with_capacity(sums.len() + 1);
            let mut mask = 0u64;
            out.push((0u64, u.clone(), sums[0].0 + 1));
            let mut i = 0;
            while i < sums.len() {
                let c = sums[i].0;
                while i < sums.len() && sums[i].0 == c {
                    mask |= 1 << sums[i].1;
                    i += 1;
                }
                out.push((mask, u.clone(), c));
            }
            out
        })
        .collect();
    let mut seen = std::collections::HashMap::new();
    for (mask, u, c) in found {
        seen.entry(mask).or_insert((u, c));
    }
    let mut sets: Vec<HalfspaceSet> = seen
        .into_iter()
        .map(|(mask, (u, c))| HalfspaceSet { k, u, c, mask })
        .collect();
    sets.sort_by_key(|s| s.mask);
    Ok(sets)
}

static ALL: [OnceLock<Vec<HalfspaceSet>>; MAX_K + 1] = [const { OnceLock::new() }; MAX_K + 1];
static MONOTONE: [OnceLock<Vec<HalfspaceSet>>; MAX_K + 1] = [const { OnceLock::new() }; MAX_K + 1];

/// Every halfspace-realisable subset of `{0,1}^k`, one entry per mask, sorted
/// by mask. Cached per `k`.
pub fn enumerate_halfspace_sets(k: usize) -> Result<&'static [HalfspaceSet]> {
    if k > MAX_K {
        return Err(Error::TooLarge(format!(
            "halfspace enumeration is limited to k <= {MAX_K} (asked for k = {k}); \
             lower the head size with --mode practical --l-cap"
        )));
    }
    Ok(ALL[k].get_or_init(|| {
        let mut sets = if k <= MAX_FUNCTION_K {
            enumerate_by_functions(k).expect("k within limits")
        } else {
            enumerate_by_weight_grid(k, GRID_BOUND).expect("k within limits")
        };
        sets.sort_by_key(|s| s.mask);
        sets
    }))
}

/// The upward-closed halfspace sets, i.e. those with a non-negative
/// realisation. These are the only sets a non-negative weight vector can
/// induce.
pub fn monotone_halfspace_sets(k: usize) -> Result<&'static [HalfspaceSet]> {
    let all = enumerate_halfspace_sets(k)?;
    Ok(MONOTONE[k].get_or_init(|| all.iter().filter(|s| s.is_monotone()).cloned().collect()))
}
