//! Derived measures over score tensors: perspective controllability,
//! mean-level change (Cohen's d), rank-order stability, ipsative change,
//! and permutation variance. All functions are pure and iterate in a
//! fixed order so results are bit-reproducible.

mod controllability;
mod stability;
mod tensor;

pub use controllability::{controllability, ControllabilityReport};
pub use stability::{
    cohens_d, ipsative_change, ipsative_change_with, mean_level_aggregate, permutation_variance,
    rank_order_stability, rank_order_stability_with, CorrelationKind, DirectionStats,
    IpsativeSummary, MeanLevelPair, MeanLevelReport, RankOrderReport, StabilityReport,
    VarianceConvention,
};
pub use tensor::{ScoreTensor, TensorRecord, Which};

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("tensor has no cell for context '{context}' and perspective '{perspective}'")]
    MissingCell {
        context: String,
        perspective: String,
    },

    #[error("dimension '{0}' is not on the tensor")]
    UnknownDimension(String),

    #[error("score row for ({context}, {perspective}, {permutation}) has {got} dimensions, tensor has {want}")]
    RowShape {
        context: String,
        perspective: String,
        permutation: u32,
        got: usize,
        want: usize,
    },

    #[error("duplicate row for ({context}, {perspective}, {permutation})")]
    DuplicateRow {
        context: String,
        perspective: String,
        permutation: u32,
    },

    #[error("perspective '{0}' has no target dimension set")]
    MissingTargets(String),

    #[error("target set for perspective '{perspective}' must be a proper nonempty subset of the dimensions ({problem})")]
    BadTargetSet {
        perspective: String,
        problem: &'static str,
    },

    #[error("need at least {need} {what}, got {got}")]
    NotEnough {
        what: &'static str,
        need: usize,
        got: usize,
    },

    #[error("group too small for an effect size: need >= 2 samples, got {0}")]
    GroupTooSmall(usize),

    #[error("contexts '{a}' and '{b}' cover different permutation sets")]
    PermutationSetMismatch { a: String, b: String },

    #[error("tensor serialization: {0}")]
    Format(String),
}

/// Pearson correlation for metric internals: allows length-2 vectors and
/// reports zero-variance inputs as `None` so callers can exclude and count
/// them instead of propagating NaN.
pub(crate) fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    debug_assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
