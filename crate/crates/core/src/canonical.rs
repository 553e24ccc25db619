//! Rewriting a weight vector into one whose tail is either empty or heavy.
//!
//! Given sorted `w` with `sum w = 1`, a split `K` and the success set
//! `S = {x : w . x >= theta}`, the linear-fractional program
//!
//! ```text
//! maximise r / (sum_{i<=K} u_i + W_T)
//! s.t.     sum_{i<=K} u_i x_i + sum_{i>K} w_i x_i >= r   for x in S
//!          u_1 >= ... >= u_K >= w_{K+1}
//! ```
//!
//! becomes, after the Charnes-Cooper substitution `t = 1/(sum u + W_T)`,
//! `s = t u`, `delta = t r`, an ordinary LP in `(t, s_1..s_K, delta)`. An
//! optimal vertex yields `v` that keeps every point of `S` above `theta` and
//! satisfies `sum_{i<=K} v_i <= (K+2)^{(K+2)/2} * sum_{i>K} v_i` unless its
//! tail is zero.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use crate::rational::{int, Rational};

pub const MAX_CANONICAL_N: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LfpVertexSolution {
    pub t_star: Rational,
    pub s_star: Vec<Rational>,
    pub delta_star: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalCase {
    /// The input tail was already zero; `v = w`.
    ZeroTail,
    /// `t* = 0`: the head alone carries all weight.
    HeadOnly,
    /// `t* > 0`: the tail is rescaled by `t*`.
    HeavyTail,
}

#[derive(Clone, Debug)]
pub struct CanonicalTail {
    pub v: Vec<Rational>,
    pub case: CanonicalCase,
    pub vertex: Option<LfpVertexSolution>,
}

/// Points of `{0,1}^n` (bit `i` is coordinate `i`) with `w . x >= theta`.
pub fn success_set(w: &[Rational], theta: &Rational) -> Vec<u64> {
    let n = w.len();
    (0..1u64 << n)
        .filter(|&x| {
            let s: Rational = (0..n).filter(|i| x >> i & 1 == 1).map(|i| &w[i]).sum();
            s >= *theta
        })
        .collect()
}

/// `sum_{i<=K} v_i <= (K+2)^{(K+2)/2} * sum_{i>K} v_i`, compared on squares.
pub fn heavy_tail_bound_holds(v: &[Rational], k: usize) -> bool {
    let head: Rational = v[..k].iter().sum();
    let tail: Rational = v[k..].iter().sum();
    let factor = num_traits::pow(int(k as i64 + 2), k + 2);
    &head * &head <= factor * &tail * &tail
}

/// The two allowed shapes: zero tail, or head at most `(K+2)^{(K+2)/2}`
/// times the tail.
pub fn tail_condition_holds(v: &[Rational], k: usize) -> bool {
    v[k..].iter().all(Zero::is_zero) || heavy_tail_bound_holds(v, k)
}

/// `k` is the 1-based split: coordinates `1..=k` form the head.
pub fn canonicalize_tail(w: &[Rational], k: usize, theta: &Rational) -> Result<CanonicalTail> {
    let n = w.len();
    if n > MAX_CANONICAL_N {
        return Err(Error::TooLarge(format!(
            "the success set of {n} coordinates is too large to materialise (limit {MAX_CANONICAL_N})"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("split K = {k} is outside 1..={n}")));
    }
    if w.iter().any(|x| *x < Rational::zero()) || !w.windows(2).all(|p| p[0] >= p[1]) {
        return Err(Error::InvalidInput("weights must be non-negative and sorted descending".into()));
    }
    if w.iter().sum::<Rational>() != Rational::one() {
        return Err(Error::InvalidInput("weights must sum to exactly 1".into()));
    }
    if *theta <= Rational::zero() || *theta >= Rational::one() {
        return Err(Error::InvalidInput("theta must lie strictly between 0 and 1".into()));
    }
    let w_tail: Rational = w[k..].iter().sum();
    if w_tail.is_zero() {
        return Ok(CanonicalTail {
            v: w.to_vec(),
            case: CanonicalCase::ZeroTail,
            vertex: None,
        });
    }

    // Variables: t, s_1..s_K, delta.
    let vars = k + 2;
    let delta_col = k + 1;
    let mut lp = LinearProgram::new(vars);
    lp.set_free(delta_col);
    for x in success_set(w, theta) {
        let mut row = vec![Rational::zero(); vars];
        row[0] = (k..n).filter(|i| x >> i & 1 == 1).map(|i| &w[i]).sum();
        for i in 0..k {
            if x >> i & 1 == 1 {
                row[1 + i] = int(1);
            }
        }
        row[delta_col] = int(-1);
        lp.add(row, Relation::Ge, int(0));
    }
    for i in 0..k {
        let mut row = vec![Rational::zero(); vars];
        row[1 + i] = int(1);
        if i + 1 < k {
            row[2 + i] = int(-1);
        } else {
            row[0] = -w[k].clone();
        }
        lp.add(row, Relation::Ge, int(0));
    }
    let mut norm = vec![int(1); vars];
    norm[0] = w_tail.clone();
    norm[delta_col] = int(0);
    lp.add(norm, Relation::Eq, int(1));
    let mut objective = vec![Rational::zero(); vars];
    objective[delta_col] = int(1);
    lp.maximize(objective);

    let LpOutcome::Optimal { point, .. } = lp_solve(&lp)? else {
        unreachable!("the program is feasible (t = 1, s = w_head) and bounded (x = 1 lies in S)");
    };
    let vertex = LfpVertexSolution {
        t_star: point[0].clone(),
        s_star: point[1..=k].to_vec(),
        delta_star: point[delta_col].clone(),
    };
    let mut v = vertex.s_star.clone();
    let case = if vertex.t_star.is_zero() {
        v.extend(std::iter::repeat_n(Rational::zero(), n - k));
        CanonicalCase::HeadOnly
    } else {
        v.extend(w[k..].iter().map(|wi| wi * &vertex.t_star));
        CanonicalCase::HeavyTail
    };
    Ok(CanonicalTail {
        v,
        case,
        vertex: Some(vertex),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn zero_tail_is_returned_unchanged() {
        let w = vec![rat(3, 5), rat(2, 5), int(0), int(0)];
        let out = canonicalize_tail(&w, 2, &rat(1, 2)).unwrap();
        assert_eq!(out.case, CanonicalCase::ZeroTail);
        assert_eq!(out.v, w);
    }

    #[test]
    fn half_quarter_quarter() {
        let w = vec![rat(1, 2), rat(1, 4), rat(1, 4)];
        let theta = rat(1, 2);
        let out = canonicalize_tail(&w, 1, &theta).unwrap();
        let v = &out.v;
        assert_eq!(v.iter().sum::<Rational>(), int(1));
        assert!(v.windows(2).all(|p| p[0] >= p[1]));
        for x in success_set(&w, &theta) {
            let s: Rational = (0..3).filter(|i| x >> i & 1 == 1).map(|i| &v[i]).sum();
            assert!(s >= theta);
        }
        assert!(tail_condition_holds(v, 1));
        assert!(out.vertex.unwrap().delta_star >= theta);
    }

    #[test]
    fn rejects_bad_inputs() {
        let w = vec![rat(1, 2), rat(1, 2)];
        assert!(canonicalize_tail(&w, 0, &rat(1, 2)).is_err());
        assert!(canonicalize_tail(&[rat(1, 4), rat(1, 2)], 1, &rat(1, 2)).is_err());
        assert!(canonicalize_tail(&[rat(1, 4), rat(1, 4)], 1, &rat(1, 2)).is_err());
        assert!(canonicalize_tail(&w, 1, &int(1)).is_err());
    }
}
