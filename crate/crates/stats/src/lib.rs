//! Statistical machinery for the analysis pipeline: one-way ANOVA,
//! Tukey HSD post-hoc comparisons, Welch's t-test, Pearson correlation,
//! Bonferroni correction, and the distribution survival functions they
//! need. Everything is pure and reentrant; iteration budgets are
//! parameters rather than globals.

mod dist;
mod special;
mod tests;
mod types;

pub use dist::{
    dist_f_sf, dist_f_sf_with_budget, dist_q_sf, dist_q_sf_resampled, dist_t_sf,
    dist_t_sf_with_budget, DEFAULT_BUDGET,
};
pub use special::{erfc, ln_gamma, norm_cdf, norm_pdf, reg_gamma_q, reg_inc_beta};
pub use tests::{bonferroni, one_way_anova, pearson_r, tukey_hsd, welch_t};
pub use types::{PairwiseComparison, TestResult};

use thiserror::Error as ThisError;

/// Iteration budget for the iterative special-function backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterBudget(pub usize);

impl Default for IterBudget {
    fn default() -> Self {
        IterBudget(400)
    }
}

/// Errors from statistical tests and distribution backends.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("{what} did not converge within {budget} iterations")]
    NoConvergence { what: &'static str, budget: usize },

    #[error("group too small: need at least {need} samples, got {got}")]
    GroupTooSmall { need: usize, got: usize },

    #[error("need at least {need} groups, got {got}")]
    TooFewGroups { need: usize, got: usize },

    #[error("sample vectors must have equal length: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
}
