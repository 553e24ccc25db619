use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::eval::ObjectiveEstimate;
use crate::model::WeightVector;

/// Which part of the solver produced a candidate. The declaration order is
/// the tie-break order of the final selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Provenance {
    Trivial,
    Junta,
    SmallCi { k: usize },
    LargeCi,
    Baseline,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Trivial => write!(f, "trivial"),
            Provenance::Junta => write!(f, "junta"),
            Provenance::SmallCi { k } => write!(f, "small_ci({k})"),
            Provenance::LargeCi => write!(f, "large_ci"),
            Provenance::Baseline => write!(f, "baseline"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Candidate {
    /// Weights over the sorted coordinates.
    pub weights: WeightVector,
    pub provenance: Provenance,
    /// Index of the tail summary that produced this candidate, if any.
    pub tail_index: Option<usize>,
    pub estimate: Option<ObjectiveEstimate>,
}

impl Candidate {
    pub fn new(weights: WeightVector, provenance: Provenance, tail_index: Option<usize>) -> Self {
        Candidate {
            weights,
            provenance,
            tail_index,
            estimate: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CandidatePool {
    pub members: Vec<Candidate>,
}

impl CandidatePool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn push(&mut self, c: Candidate) {
        self.members.push(c);
    }

    pub fn extend(&mut self, other: CandidatePool) {
        self.members.extend(other.members);
    }

    pub fn all_feasible(&self) -> bool {
        self.members.iter().all(|c| c.weights.is_feasible())
    }

    pub fn count(&self, pred: impl Fn(&Provenance) -> bool) -> usize {
        self.members.iter().filter(|c| pred(&c.provenance)).count()
    }

    /// Highest estimate; ties by provenance, then lexicographically smallest
    /// weights. `None` if the pool is empty or some member lacks an estimate.
    pub fn best(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, c) in self.members.iter().enumerate() {
            let value = c.estimate.as_ref()?.value;
            best = match best {
                None => Some(i),
                Some(b) => {
                    let other = &self.members[b];
                    let ord = value
                        .partial_cmp(&other.estimate.as_ref()?.value)
                        .unwrap_or(Ordering::Equal)
                        .then_with(|| other.provenance.cmp(&c.provenance))
                        .then_with(|| other.weights.weights.cmp(&c.weights.weights));
                    if ord == Ordering::Greater {
                        Some(i)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    }
}
