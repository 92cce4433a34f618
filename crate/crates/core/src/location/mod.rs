//! Two-sample and k-sample location tests with their post-hoc procedures.

mod parametric;
mod ranks;

pub use parametric::{one_way_anova, tukey_hsd, two_sample_t, AnovaResult, TVariant};
pub use rank_tests::{kruskal_wallis, mann_whitney, pairwise_mann_whitney, Correction};
pub use ranks::{rank_with_ties, Ranking};

pub(crate) use parametric::one_way_parts;

use serde::{Deserialize, Serialize};

pub const T_POOLED: &str = "t_pooled";
pub const T_WELCH: &str = "t_welch";
pub const ANOVA: &str = "anova";
pub const TUKEY_HSD: &str = "tukey_hsd";
pub const MANN_WHITNEY: &str = "mann_whitney";
pub const MANN_WHITNEY_EXACT: &str = "mann_whitney_exact";
pub const KRUSKAL_WALLIS: &str = "kruskal_wallis";
pub const PAIRWISE_MANN_WHITNEY: &str = "pairwise_mann_whitney";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label_a: String,
    pub label_b: String,
    /// Mean difference (Tukey) or median difference (Mann-Whitney), a minus b.
    pub estimate: f64,
    pub statistic: f64,
    pub p_value: f64,
    pub significant_at_alpha: bool,
}

/// All k(k-1)/2 pairwise comparisons; pairs follow group order, `a` before `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResults {
    pub comparisons: Vec<Comparison>,
    pub family_method: String,
    /// Per-comparison threshold after any multiplicity correction.
    pub alpha: f64,
}

impl PairwiseResults {
    pub fn significant(&self) -> impl Iterator<Item = &Comparison> {
        self.comparisons.iter().filter(|c| c.significant_at_alpha)
    }

    /// The comparison between two labels, in either order.
    pub fn find(&self, a: &str, b: &str) -> Option<&Comparison> {
        self.comparisons
            .iter()
            .find(|c| (c.label_a == a && c.label_b == b) || (c.label_a == b && c.label_b == a))
    }
}

pub(crate) fn check_alpha(alpha: f64) -> crate::StatResult<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(crate::StatError::InvalidParameter(format!(
            "alpha must be in (0,1), got {alpha}"
        )))
    }
}
