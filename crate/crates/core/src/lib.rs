//! Approximation scheme for fault-tolerant storage allocation.
//!
//! Given independent survival probabilities `p_1..p_n` and a recovery
//! threshold `theta`, find non-negative weights `w` with `sum w <= 1` that
//! maximise `Pr[w . X >= theta]`, where `X_i ~ Bernoulli(p_i)`.

pub mod benchmark;
pub mod canonical;
pub mod config;
pub mod dist;
pub mod error;
pub mod eval;
pub mod gen;
pub mod halfspace;
pub mod head;
pub mod io;
pub mod junta;
pub mod large_ci;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod pool;
pub mod rational;
pub mod regularity;
pub mod sampling;
pub mod small_ci;

pub use config::{Mode, SolverConfig};
pub use error::{Error, Result};
pub use model::{preprocess, Preprocessed, ProblemInstance, WeightVector};
pub use rational::Rational;
pub use pipeline::{solve, SolveReport};
pub use pool::{Candidate, CandidatePool, Provenance};
