//! Empirical rejection rates of single tests and of the whole tree.
//!
//! Replicate `i` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to
//! stream `i`, so a report depends only on the scenario, never on how rayon
//! schedules the work. Normal variates are `std_normal_quantile(u)` for
//! `u` on the open unit interval.

use crate::dataset::{GroupedSample, Sample};
use crate::engine::{analyze, EngineConfig};
use crate::homogeneity::{levene, Center};
use crate::location::{kruskal_wallis, mann_whitney, one_way_anova, two_sample_t, TVariant};
use crate::normality::{ks_normal, shapiro_wilk};
use crate::special::std_normal_quantile;
use crate::{StatError, StatResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Distribution {
    Normal { mu: f64, sigma: f64 },
    Uniform { a: f64, b: f64 },
    Exponential { lambda: f64 },
}

impl Distribution {
    fn validate(&self) -> StatResult<()> {
        let ok = match *self {
            Distribution::Normal { mu, sigma } => mu.is_finite() && sigma.is_finite() && sigma > 0.0,
            Distribution::Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
            Distribution::Exponential { lambda } => lambda.is_finite() && lambda > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(StatError::InvalidParameter(format!("invalid distribution {self:?}")))
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        // 53 random bits shifted off zero: u in (0, 1)
        let u = ((rng.random::<u64>() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        match *self {
            Distribution::Normal { mu, sigma } => {
                mu + sigma * std_normal_quantile(u).expect("u is inside (0, 1)")
            }
            Distribution::Uniform { a, b } => a + (b - a) * u,
            Distribution::Exponential { lambda } => -(-u).ln_1p() / lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub distribution: Distribution,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    /// Every group is drawn from the same distribution.
    Null,
    Alternative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub group_specs: Vec<GroupSpec>,
    pub truth: Truth,
    pub seed: u64,
}

impl Scenario {
    /// Null scenario with `k` groups of `n` standard normals.
    pub fn null_normal(k: usize, n: usize, seed: u64) -> Self {
        let spec = GroupSpec {
            distribution: Distribution::Normal { mu: 0.0, sigma: 1.0 },
            n,
        };
        Self {
            group_specs: vec![spec; k],
            truth: Truth::Null,
            seed,
        }
    }

    pub fn validate(&self) -> StatResult<()> {
        if self.group_specs.is_empty() {
            return Err(StatError::InvalidParameter("scenario has no groups".into()));
        }
        for g in &self.group_specs {
            g.distribution.validate()?;
            if g.n < 3 {
                return Err(StatError::InvalidParameter(format!(
                    "scenario groups need at least 3 values, got {}",
                    g.n
                )));
            }
        }
        let first = self.group_specs[0].distribution;
        let same = self.group_specs.iter().all(|g| g.distribution == first);
        match (self.truth, same) {
            (Truth::Null, false) => Err(StatError::InvalidParameter(
                "null scenario with differing group distributions".into(),
            )),
            (Truth::Alternative, true) if self.group_specs.len() > 1 => Err(StatError::InvalidParameter(
                "alternative scenario with identical group distributions".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Data for replicate `index`, one sample per group spec.
    pub fn generate(&self, index: u64) -> Vec<Sample> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        self.group_specs
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let values = (0..g.n).map(|_| g.distribution.draw(&mut rng)).collect();
                Sample::new(format!("g{}", i + 1), values)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    TTest,
    WelchT,
    Anova,
    MannWhitney,
    KruskalWallis,
    /// Median-centred (Brown-Forsythe), as used by the decision tree.
    Levene,
    LeveneMean,
    /// Applied to the first group only.
    ShapiroWilk,
    /// Applied to the first group only.
    KsNormal,
    /// The full decision tree with default settings; rejects when its primary test does.
    Pipeline,
}

impl TestKind {
    pub const ALL: [TestKind; 10] = [
        TestKind::TTest,
        TestKind::WelchT,
        TestKind::Anova,
        TestKind::MannWhitney,
        TestKind::KruskalWallis,
        TestKind::Levene,
        TestKind::LeveneMean,
        TestKind::ShapiroWilk,
        TestKind::KsNormal,
        TestKind::Pipeline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::TTest => "t",
            TestKind::WelchT => "welch",
            TestKind::Anova => "anova",
            TestKind::MannWhitney => "mann-whitney",
            TestKind::KruskalWallis => "kruskal-wallis",
            TestKind::Levene => "levene",
            TestKind::LeveneMean => "levene-mean",
            TestKind::ShapiroWilk => "shapiro-wilk",
            TestKind::KsNormal => "ks",
            TestKind::Pipeline => "pipeline",
        }
    }

    fn groups_needed(self) -> Option<usize> {
        match self {
            TestKind::TTest | TestKind::WelchT | TestKind::MannWhitney => Some(2),
            TestKind::ShapiroWilk | TestKind::KsNormal => None,
            _ => Some(0),
        }
    }

    fn p_value(self, gs: Vec<Sample>, alpha: f64) -> StatResult<f64> {
        if self.groups_needed().is_none() {
            return Ok(match self {
                TestKind::ShapiroWilk => shapiro_wilk(&gs[0])?.p_value,
                _ => ks_normal(&gs[0])?.p_value,
            });
        }
        let g = &GroupedSample::new("y", "group", gs).expect("validated scenario has labelled groups");
        let gs = g.groups();
        Ok(match self {
            TestKind::TTest => two_sample_t(&gs[0], &gs[1], TVariant::Pooled)?.p_value,
            TestKind::WelchT => two_sample_t(&gs[0], &gs[1], TVariant::Welch)?.p_value,
            TestKind::Anova => one_way_anova(g)?.p_value,
            TestKind::MannWhitney => mann_whitney(&gs[0], &gs[1])?.p_value,
            TestKind::KruskalWallis => kruskal_wallis(g)?.p_value,
            TestKind::Levene => levene(g, Center::Median)?.p_value,
            TestKind::LeveneMean => levene(g, Center::Mean)?.p_value,
            TestKind::ShapiroWilk | TestKind::KsNormal => unreachable!(),
            TestKind::Pipeline => {
                let cfg = EngineConfig {
                    alpha,
                    ..Default::default()
                };
                analyze(g, &cfg)?.conclusion.p_value
            }
        })
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        let alias = match key.as_str() {
            "t-test" | "ttest" => "t",
            "sw" => "shapiro-wilk",
            "mw" => "mann-whitney",
            "kw" => "kruskal-wallis",
            "ks-normal" => "ks",
            other => other,
        };
        TestKind::ALL
            .into_iter()
            .find(|t| t.name() == alias)
            .ok_or_else(|| {
                let names: Vec<_> = TestKind::ALL.iter().map(|t| t.name()).collect();
                format!("unknown test {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateReport {
    pub test: TestKind,
    pub truth: Truth,
    pub replications: usize,
    pub rejections: usize,
    /// Replicates where the test could not be computed; counted as non-rejections.
    pub failures: usize,
    pub rate: f64,
    pub target_alpha: f64,
    /// Three binomial standard errors at `target_alpha`.
    pub ci_halfwidth: f64,
}

impl ErrorRateReport {
    pub fn within_band(&self) -> bool {
        (self.rate - self.target_alpha).abs() <= self.ci_halfwidth
    }
}

/// Fraction of replicates in which `test` rejects at level `alpha`.
pub fn simulate_error_rates(
    scenario: &Scenario,
    test: TestKind,
    replications: usize,
    alpha: f64,
) -> StatResult<ErrorRateReport> {
    scenario.validate()?;
    if replications == 0 {
        return Err(StatError::InvalidParameter("replications must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatError::InvalidParameter(format!("alpha must be in (0,1), got {alpha}")));
    }
    let k = scenario.group_specs.len();
    match test.groups_needed() {
        Some(2) if k != 2 => {
            return Err(StatError::InvalidParameter(format!("{test} needs exactly 2 groups, scenario has {k}")))
        }
        Some(0) if k < 2 => {
            return Err(StatError::InvalidParameter(format!("{test} needs at least 2 groups")))
        }
        _ => {}
    }
    if test == TestKind::KsNormal && scenario.group_specs[0].n < 4 {
        return Err(StatError::InvalidParameter("ks needs at least 4 values".into()));
    }

    let (rejections, failures) = (0..replications as u64)
        .into_par_iter()
        .map(|i| match test.p_value(scenario.generate(i), alpha) {
            Ok(p) => ((p < alpha) as usize, 0),
            Err(_) => (0, 1),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let r = replications as f64;
    Ok(ErrorRateReport {
        test,
        truth: scenario.truth,
        replications,
        rejections,
        failures,
        rate: rejections as f64 / r,
        target_alpha: alpha,
        ci_halfwidth: 3.0 * (alpha * (1.0 - alpha) / r).sqrt(),
    })
}
