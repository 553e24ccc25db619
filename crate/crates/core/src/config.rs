use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Constants exactly as in the analysis; only degenerate-tiny instances
    /// finish.
    Theory,
    /// Caller-supplied granularity and head-size cap.
    Practical,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(Mode::Theory),
            "practical" => Ok(Mode::Practical),
            other => Err(Error::InvalidInput(format!(
                "unknown mode {other:?} (expected theory or practical)"
            ))),
        }
    }
}

/// Solver knobs, including the constants hidden by the asymptotic notation.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Multiplier on the head-size cutoff `L`.
    pub c_l: Rational,
    pub kappa_override: Option<Rational>,
    pub l_cap: Option<usize>,
    /// Multiplier on every Monte-Carlo sample-size formula.
    pub mc_constant: Rational,
    pub seed: u64,
    pub exact_eval_max_n: usize,
    /// Upper bound on dynamic-programming states (and on their a-priori
    /// estimate when choosing the granularity).
    pub state_space_limit: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::Theory,
            c_l: int(1),
            kappa_override: None,
            l_cap: None,
            mc_constant: int(1),
            seed: 0,
            exact_eval_max_n: 22,
            state_space_limit: 100_000_000,
        }
    }
}

impl SolverConfig {
    /// A practical-mode configuration with the given granularity and head cap.
    pub fn practical(kappa: Rational, l_cap: usize) -> Self {
        SolverConfig {
            mode: Mode::Practical,
            kappa_override: Some(kappa),
            l_cap: Some(l_cap),
            ..SolverConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: &Rational| {
            if *v <= int(0) {
                Err(Error::InvalidInput(format!("{name} must be positive")))
            } else {
                Ok(())
            }
        };
        positive("c_L", &self.c_l)?;
        positive("mc_constant", &self.mc_constant)?;
        if let Some(k) = &self.kappa_override {
            positive("kappa", k)?;
            if *k > int(1) {
                return Err(Error::InvalidInput("kappa must be at most 1".into()));
            }
        }
        if self.l_cap == Some(0) {
            return Err(Error::InvalidInput("L cap must be at least 1".into()));
        }
        if self.state_space_limit == 0 {
            return Err(Error::InvalidInput("state-space limit must be positive".into()));
        }
        if self.mode == Mode::Theory && (self.kappa_override.is_some() || self.l_cap.is_some()) {
            return Err(Error::InvalidInput(
                "theory mode does not accept a kappa override or an L cap; use --mode practical"
                    .into(),
            ));
        }
        Ok(())
    }
}
