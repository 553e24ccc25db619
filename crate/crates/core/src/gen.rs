//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io::InstanceSpec;
use crate::rational::{rat, Rational};
use crate::sampling::derive_seed;

const GENERATOR_STREAM: u64 = 3;

#[derive(Clone, Debug)]
pub struct GenParams {
    pub n: usize,
    /// Probabilities are drawn uniformly from `[lo, hi]`, in steps of 1/1000.
    pub lo: f64,
    pub hi: f64,
    pub theta: Rational,
    pub epsilon: Rational,
    pub delta: Rational,
    pub seed: u64,
}

pub fn generate(params: &GenParams) -> Result<InstanceSpec> {
    if params.n == 0 {
        return Err(Error::InvalidInput("instance needs at least one node".into()));
    }
    if !(0.0..=1.0).contains(&params.lo) || !(0.0..=1.0).contains(&params.hi) || params.lo > params.hi {
        return Err(Error::InvalidInput(format!(
            "probability range [{}, {}] is not a sub-interval of [0, 1]",
            params.lo, params.hi
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, GENERATOR_STREAM, 0));
    let (lo, hi) = ((params.lo * 1000.0).ceil() as i64, (params.hi * 1000.0).floor() as i64);
    if lo > hi {
        return Err(Error::InvalidInput("probability range contains no multiple of 1/1000".into()));
    }
    let probs = (0..params.n).map(|_| rat(rng.random_range(lo..=hi), 1000)).collect();
    Ok(InstanceSpec {
        probs,
        theta: params.theta.clone(),
        epsilon: params.epsilon.clone(),
        delta: params.delta.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{preprocess, Preprocessed};

    fn params(n: usize, lo: f64, hi: f64, seed: u64) -> GenParams {
        GenParams {
            n,
            lo,
            hi,
            theta: rat(1, 2),
            epsilon: rat(1, 20),
            delta: rat(1, 20),
            seed,
        }
    }

    #[test]
    fn reproducible_and_in_range() {
        let a = generate(&params(4, 0.3, 0.7, 1)).unwrap();
        assert_eq!(a, generate(&params(4, 0.3, 0.7, 1)).unwrap());
        assert_ne!(a, generate(&params(4, 0.3, 0.7, 2)).unwrap());
        assert!(a.probs.iter().all(|p| *p >= rat(3, 10) && *p <= rat(7, 10)));
    }

    #[test]
    fn reliable_range_trips_the_shortcut() {
        let s = generate(&params(3, 0.99, 1.0, 5)).unwrap();
        let pre = preprocess(&s.probs, &s.theta, &s.epsilon, &s.delta).unwrap();
        assert!(matches!(pre, Preprocessed::Trivial(_)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(generate(&params(0, 0.3, 0.7, 1)).is_err());
        assert!(generate(&params(3, 0.7, 0.3, 1)).is_err());
        assert!(generate(&params(3, -0.1, 0.3, 1)).is_err());
    }
}
