//! Regularity and critical index of weight vectors.
//!
//! All comparisons `|w_i| <= tau * sigma_i` are done on squares in exact
//! arithmetic, so no square roots are ever taken.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CriticalIndex {
    /// 1-based index into the (zero-stripped) vector.
    Finite(usize),
    Infinite,
}

#[derive(Clone, Debug)]
pub struct RegularityReport {
    pub tau: Rational,
    /// `sigma_sq[k] = sum_{i >= k} w_i^2` (0-based `k`) over the stripped
    /// vector.
    pub sigma_sq: Vec<Rational>,
    pub critical_index: CriticalIndex,
    /// Number of trailing zeros removed before the computation.
    pub stripped_zeros: usize,
}

impl RegularityReport {
    pub fn sigma(&self, k: usize) -> f64 {
        to_f64(&self.sigma_sq[k]).sqrt()
    }
}

/// The `tau`-critical index of `w`: the smallest `i` with
/// `|w_i| <= tau * sqrt(sum_{j >= i} w_j^2)`.
///
/// `w` must be non-increasing in absolute value. Trailing zeros are stripped
/// first and counted in the report.
pub fn critical_index(w: &[Rational], tau: &Rational) -> Result<RegularityReport> {
    if !tau.is_positive() {
        return Err(Error::InvalidInput("tau must be positive".into()));
    }
    if w.windows(2).any(|p| p[0].abs() < p[1].abs()) {
        return Err(Error::InvalidInput(
            "critical index needs weights non-increasing in absolute value".into(),
        ));
    }
    let len = w.iter().rposition(|x| !x.is_zero()).map_or(0, |i| i + 1);
    if len == 0 {
        return Err(Error::InvalidInput("critical index of the zero vector".into()));
    }
    let stripped = &w[..len];
    let mut sigma_sq = vec![Rational::zero(); len];
    let mut acc = Rational::zero();
    for k in (0..len).rev() {
        acc += &stripped[k] * &stripped[k];
        sigma_sq[k] = acc.clone();
    }
    let tau_sq = tau * tau;
    let critical = (0..len)
        .find(|&k| &stripped[k] * &stripped[k] <= &tau_sq * &sigma_sq[k])
        .map_or(CriticalIndex::Infinite, |k| CriticalIndex::Finite(k + 1));
    Ok(RegularityReport {
        tau: tau.clone(),
        sigma_sq,
        critical_index: critical,
        stripped_zeros: w.len() - len,
    })
}

/// `max_i |w_i| <= tau * ||w||_2`.
pub fn is_regular(w: &[Rational], tau: &Rational) -> Result<bool> {
    let norm_sq: Rational = w.iter().map(|x| x * x).sum();
    if norm_sq.is_zero() {
        return Err(Error::InvalidInput("regularity of the zero vector".into()));
    }
    let max = w.iter().map(|x| x.abs()).max().expect("non-empty");
    Ok(&max * &max <= tau * tau * norm_sq)
}
