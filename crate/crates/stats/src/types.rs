use serde::{Deserialize, Serialize};

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df1: f64,
    /// Second degrees-of-freedom value for two-parameter distributions (F).
    pub df2: Option<f64>,
    pub p_value: f64,
    /// Adjusted alpha the result was compared against, when one was supplied.
    pub significant_at: Option<f64>,
    pub method: String,
    /// Set when the inputs collapse (all values equal) and the p-value of 1
    /// is returned by convention rather than computed.
    pub degenerate: bool,
}

impl TestResult {
    /// True when a threshold was supplied and the p-value falls below it.
    pub fn significant(&self) -> bool {
        matches!(self.significant_at, Some(alpha) if self.p_value < alpha)
    }
}

/// One pair inside a post-hoc comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub group_a: String,
    pub group_b: String,
    pub mean_difference: f64,
    /// Studentized range statistic (Tukey HSD).
    pub statistic: f64,
    pub p_value: f64,
    pub significant: bool,
}
