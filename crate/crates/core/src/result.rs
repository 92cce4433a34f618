use serde::{Deserialize, Serialize};

/// Degrees of freedom attached to a test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Df {
    One(f64),
    Pair(f64, f64),
}

/// Outcome of one statistical test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: String,
    pub statistic_name: String,
    pub statistic: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub df: Option<Df>,
    pub p_value: f64,
    pub n_per_group: Vec<usize>,
}

impl TestResult {
    pub(crate) fn new(
        method: &str,
        statistic_name: &str,
        statistic: f64,
        df: Option<Df>,
        p_value: f64,
        n_per_group: Vec<usize>,
    ) -> Self {
        debug_assert!(statistic.is_finite(), "{method}: non-finite statistic");
        Self {
            method: method.to_string(),
            statistic_name: statistic_name.to_string(),
            statistic,
            df,
            p_value: p_value.clamp(0.0, 1.0),
            n_per_group,
        }
    }

    /// `p_value < alpha`.
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}
