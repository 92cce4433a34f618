//! Levene's test for equal variances across groups.

use crate::dataset::GroupedSample;
use crate::descriptive::{mean_of, median_sorted, sorted};
use crate::location::one_way_parts;
use crate::special::f_sf;
use crate::{Df, StatError, StatResult, TestResult};
use serde::{Deserialize, Serialize};

pub const LEVENE_MEDIAN: &str = "levene_median";
pub const LEVENE_MEAN: &str = "levene_mean";

/// Location each group is centred on before taking absolute deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    /// Brown-Forsythe variant.
    #[default]
    Median,
    Mean,
}

/// One-way ANOVA on `|x - center(group)|`; W is that F on (k-1, N-k) df.
pub fn levene(g: &GroupedSample, center: Center) -> StatResult<TestResult> {
    let k = g.k();
    for s in g.groups() {
        if s.len() < 2 {
            return Err(StatError::InsufficientData {
                what: "Levene",
                needed: 2,
                got: s.len(),
            });
        }
    }
    let deviations: Vec<Vec<f64>> = g
        .groups()
        .iter()
        .map(|s| {
            let c = match center {
                Center::Median => median_sorted(&sorted(&s.values)),
                Center::Mean => mean_of(&s.values),
            };
            s.values.iter().map(|x| (x - c).abs()).collect()
        })
        .collect();
    if deviations.iter().flatten().all(|&z| z == 0.0) {
        return Err(StatError::ZeroVariance("Levene"));
    }
    let views: Vec<&[f64]> = deviations.iter().map(Vec::as_slice).collect();
    let parts = one_way_parts(&views);
    if !(parts.ss_within > 0.0) {
        return Err(StatError::ZeroVariance("Levene"));
    }
    let w = (parts.ss_between / parts.df_between) / (parts.ss_within / parts.df_within);
    let p = f_sf(w, parts.df_between, parts.df_within)?;
    let method = match center {
        Center::Median => LEVENE_MEDIAN,
        Center::Mean => LEVENE_MEAN,
    };
    debug_assert_eq!(parts.df_between, (k - 1) as f64);
    Ok(TestResult::new(
        method,
        "W",
        w,
        Some(Df::Pair(parts.df_between, parts.df_within)),
        p,
        g.sizes(),
    ))
}
