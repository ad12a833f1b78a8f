//! Inference battery for condition contrasts at the network level:
//! permutation tests and Welch's t for cluster-mean comparisons, logistic
//! regression by IRLS for decision-level models, and bootstrap mediation
//! analysis.

mod logistic;
mod mediation;
mod permutation;
mod welch;

pub use logistic::{logistic_fit, LogisticFit};
pub use mediation::{mediate, MediationResult};
pub use permutation::permutation_test;
pub use welch::{welch_t, WelchT};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("sample {label:?} needs at least {need} clusters, got {got}")]
    TooFewClusters {
        label: String,
        need: usize,
        got: usize,
    },
    #[error("need at least {need} {what}, got {got}")]
    TooFewIterations {
        what: &'static str,
        need: usize,
        got: usize,
    },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("input lengths differ: {0}")]
    LengthMismatch(String),
    #[error("design matrix is rank deficient or collinear")]
    RankDeficient,
    #[error("outcome takes a single value; both classes are required")]
    SingleClassOutcome,
    #[error("apparent perfect separation driven by column {column}")]
    PerfectSeparation { column: usize },
}

/// One aggregate value per independent cluster (networked group), under a
/// single condition label.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredSample {
    pub label: String,
    pub values: Vec<f64>,
}

impl ClusteredSample {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> ClusteredSample {
        ClusteredSample {
            label: label.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}
