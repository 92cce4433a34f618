//! The test-selection tree and its audit trail.
//!
//! Gates run in a fixed order: normality per group, then Levene, then a
//! branch chosen from the two gate outcomes and the number of treatments.
//! Levene always runs; when normality has already failed its result is kept
//! but marked informational.

use crate::dataset::GroupedSample;
use crate::descriptive::{classify_outliers, describe, DescriptiveSummary, OutlierReport};
use crate::homogeneity::{levene, Center};
use crate::location::{
    kruskal_wallis, mann_whitney, one_way_anova, pairwise_mann_whitney, tukey_hsd, two_sample_t,
    AnovaResult, Correction, PairwiseResults, TVariant,
};
use crate::normality::{normality_check_with, NormalityOptions, DEFAULT_SIZE_THRESHOLD};
use crate::{StatError, StatResult, TestResult, DEFAULT_ALPHA};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "stattree.report/1";

/// Smallest group the tree accepts (the Shapiro-Wilk minimum).
pub const MIN_GROUP_SIZE: usize = 3;

/// Outlier fences need at least this many points.
const MIN_OUTLIER_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub alpha: f64,
    pub size_threshold: usize,
    pub levene_center: Center,
    pub t_variant: TVariant,
    pub posthoc_correction: Correction,
    /// Lilliefors p-values for groups tested with Kolmogorov-Smirnov.
    #[serde(default)]
    pub lilliefors: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            size_threshold: DEFAULT_SIZE_THRESHOLD,
            levene_center: Center::Median,
            t_variant: TVariant::Pooled,
            posthoc_correction: Correction::None,
            lilliefors: false,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> StatResult<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(StatError::InvalidParameter(format!(
                "alpha must be in (0,1), got {}",
                self.alpha
            )));
        }
        if self.size_threshold == 0 {
            return Err(StatError::InvalidParameter("size threshold must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    TTest,
    Anova,
    MannWhitney,
    KruskalWallis,
}

impl Branch {
    pub fn is_parametric(self) -> bool {
        matches!(self, Branch::TTest | Branch::Anova)
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::TTest => "t test",
            Branch::Anova => "one-way ANOVA",
            Branch::MannWhitney => "Mann-Whitney",
            Branch::KruskalWallis => "Kruskal-Wallis",
        }
    }
}

/// Both gates passed picks the parametric test, anything else the rank test.
pub fn route(normal: bool, homoscedastic: bool, k: usize) -> Branch {
    match (normal && homoscedastic, k <= 2) {
        (true, true) => Branch::TTest,
        (true, false) => Branch::Anova,
        (false, true) => Branch::MannWhitney,
        (false, false) => Branch::KruskalWallis,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Normality,
    Homoscedasticity,
    BranchSelection,
    PrimaryTest,
    Posthoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDecision {
    pub normal: bool,
    pub homoscedastic: bool,
    pub k: usize,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Test(TestResult),
    Anova(AnovaResult),
    Branch(BranchDecision),
    Pairwise(PairwiseResults),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub node: Node,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub evidence: Evidence,
    pub outcome: String,
    /// Computed for completeness only; did not influence routing.
    #[serde(default)]
    pub informational: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecisionTrace {
    pub steps: Vec<TraceStep>,
}

impl DecisionTrace {
    pub fn of(&self, node: Node) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(move |s| s.node == node)
    }

    fn push(&mut self, node: Node, group: Option<String>, evidence: Evidence, outcome: String) {
        self.steps.push(TraceStep {
            node,
            group,
            evidence,
            outcome,
            informational: false,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primary {
    Test(TestResult),
    Anova(AnovaResult),
}

impl Primary {
    pub fn p_value(&self) -> f64 {
        match self {
            Primary::Test(t) => t.p_value,
            Primary::Anova(a) => a.p_value,
        }
    }

    pub fn as_test_result(&self) -> TestResult {
        match self {
            Primary::Test(t) => t.clone(),
            Primary::Anova(a) => a.to_test_result(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    RejectH0,
    FailToRejectH0,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conclusion {
    pub decision: Decision,
    pub alpha: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub h0: String,
    pub h1: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: String,
    pub response: String,
    pub factor: String,
    pub config: EngineConfig,
    pub per_group_descriptives: IndexMap<String, DescriptiveSummary>,
    /// Groups with fewer than four values have no fences and are omitted.
    pub outliers: IndexMap<String, OutlierReport>,
    pub trace: DecisionTrace,
    pub branch: Branch,
    pub primary: Primary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posthoc: Option<PairwiseResults>,
    pub conclusion: Conclusion,
    pub hypotheses: Hypotheses,
}

impl AnalysisReport {
    /// Per-group normality results in group order.
    pub fn normality(&self) -> impl Iterator<Item = (&str, &TestResult)> {
        self.trace.of(Node::Normality).filter_map(|s| match (&s.group, &s.evidence) {
            (Some(g), Evidence::Test(t)) => Some((g.as_str(), t)),
            _ => None,
        })
    }

    pub fn levene(&self) -> &TestResult {
        match self.trace.of(Node::Homoscedasticity).next().map(|s| &s.evidence) {
            Some(Evidence::Test(t)) => t,
            _ => unreachable!("every report records a homoscedasticity step"),
        }
    }

    pub fn branch_decision(&self) -> &BranchDecision {
        match self.trace.of(Node::BranchSelection).next().map(|s| &s.evidence) {
            Some(Evidence::Branch(b)) => b,
            _ => unreachable!("every report records a branch selection"),
        }
    }

    pub fn rejects(&self) -> bool {
        self.conclusion.decision == Decision::RejectH0
    }
}

fn cmp(p: f64, alpha: f64) -> String {
    if p < alpha {
        format!("p < {alpha}")
    } else {
        format!("p >= {alpha}")
    }
}

fn hypotheses(g: &GroupedSample, branch: Branch) -> Hypotheses {
    let levels: Vec<&str> = g.groups().iter().map(|s| s.label.as_str()).collect();
    let levels = levels.join(", ");
    let (r, f) = (&g.response_name, &g.factor_name);
    if branch.is_parametric() {
        Hypotheses {
            h0: format!("the mean of {r} is equal across the levels of {f} ({levels})"),
            h1: format!("the mean of {r} differs for at least one level of {f}"),
        }
    } else {
        Hypotheses {
            h0: format!("{r} has the same distribution across the levels of {f} ({levels})"),
            h1: format!("{r} tends to be larger or smaller for at least one level of {f}"),
        }
    }
}

/// Runs the full tree on one response split by one factor.
pub fn analyze(g: &GroupedSample, config: &EngineConfig) -> StatResult<AnalysisReport> {
    config.validate()?;
    let alpha = config.alpha;
    for s in g.groups() {
        if s.len() < MIN_GROUP_SIZE {
            return Err(StatError::InsufficientData {
                what: "analysis group",
                needed: MIN_GROUP_SIZE,
                got: s.len(),
            });
        }
    }

    let mut per_group_descriptives = IndexMap::new();
    let mut outliers = IndexMap::new();
    for s in g.groups() {
        per_group_descriptives.insert(s.label.clone(), describe(s)?);
        if s.len() >= MIN_OUTLIER_N {
            outliers.insert(s.label.clone(), classify_outliers(s)?);
        }
    }

    let mut trace = DecisionTrace::default();
    let normality = normality_check_with(
        g,
        alpha,
        &NormalityOptions {
            size_threshold: config.size_threshold,
            lilliefors: config.lilliefors,
        },
    )?;
    let mut first_non_normal = None;
    for (label, r) in &normality.per_group {
        let pass = r.p_value >= alpha;
        if !pass && first_non_normal.is_none() {
            first_non_normal = Some(label.clone());
        }
        let verdict = if pass { "normal" } else { "not normal" };
        trace.push(
            Node::Normality,
            Some(label.clone()),
            Evidence::Test(r.clone()),
            format!("{}: {verdict}", cmp(r.p_value, alpha)),
        );
    }
    let normal = normality.all_normal;

    let lev = levene(g, config.levene_center)?;
    let homoscedastic = lev.p_value >= alpha;
    trace.push(
        Node::Homoscedasticity,
        None,
        Evidence::Test(lev.clone()),
        format!(
            "{}: variances {}",
            cmp(lev.p_value, alpha),
            if homoscedastic { "homogeneous" } else { "differ" }
        ),
    );
    trace.steps.last_mut().unwrap().informational = !normal;

    let k = g.k();
    let branch = route(normal, homoscedastic, k);
    let reason = match (&first_non_normal, homoscedastic) {
        (Some(label), _) => format!("group {label} failed the normality gate"),
        (None, false) => "Levene rejected equal variances".to_string(),
        (None, true) => "all groups normal and variances homogeneous".to_string(),
    };
    trace.push(
        Node::BranchSelection,
        None,
        Evidence::Branch(BranchDecision {
            normal,
            homoscedastic,
            k,
            branch,
        }),
        format!("{}: {reason}", branch.label()),
    );

    let groups = g.groups();
    let primary = match branch {
        Branch::TTest => Primary::Test(two_sample_t(&groups[0], &groups[1], config.t_variant)?),
        Branch::Anova => Primary::Anova(one_way_anova(g)?),
        Branch::MannWhitney => Primary::Test(mann_whitney(&groups[0], &groups[1])?),
        Branch::KruskalWallis => Primary::Test(kruskal_wallis(g)?),
    };
    let p = primary.p_value();
    let reject = p < alpha;
    trace.push(
        Node::PrimaryTest,
        None,
        match &primary {
            Primary::Test(t) => Evidence::Test(t.clone()),
            Primary::Anova(a) => Evidence::Anova(a.clone()),
        },
        format!(
            "{}: {}",
            cmp(p, alpha),
            if reject { "reject H0" } else { "fail to reject H0" }
        ),
    );

    let posthoc = if reject && k > 2 {
        let pw = match branch {
            Branch::Anova => tukey_hsd(g, alpha)?,
            _ => pairwise_mann_whitney(g, alpha, config.posthoc_correction)?,
        };
        let sig: Vec<String> = pw
            .significant()
            .map(|c| format!("{}-{}", c.label_a, c.label_b))
            .collect();
        let outcome = if sig.is_empty() {
            format!("{}: no pair significant", pw.family_method)
        } else {
            format!("{}: significant {}", pw.family_method, sig.join(", "))
        };
        trace.push(Node::Posthoc, None, Evidence::Pairwise(pw.clone()), outcome);
        Some(pw)
    } else {
        None
    };

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION.to_string(),
        response: g.response_name.clone(),
        factor: g.factor_name.clone(),
        config: *config,
        per_group_descriptives,
        outliers,
        trace,
        branch,
        primary,
        posthoc,
        conclusion: Conclusion {
            decision: if reject {
                Decision::RejectH0
            } else {
                Decision::FailToRejectH0
            },
            alpha,
            p_value: p,
        },
        hypotheses: hypotheses(g, branch),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{
        builtin_table2, select_response_factor, CASES_SIZE, DIFFERENCE, EXPECTED_HOURS, MOMENT,
    };
    use crate::special::std_normal_quantile;
    use proptest::prelude::*;

    fn table2(resp: &str, fac: &str) -> AnalysisReport {
        let g = select_response_factor(&builtin_table2(), resp, fac).unwrap();
        analyze(&g, &EngineConfig::default()).unwrap()
    }

    fn check_trace(r: &AnalysisReport, k: usize) {
        let nodes: Vec<Node> = r.trace.steps.iter().map(|s| s.node).collect();
        let mut expected = vec![Node::Normality; k];
        expected.extend([Node::Homoscedasticity, Node::BranchSelection, Node::PrimaryTest]);
        if r.conclusion.p_value < r.config.alpha && k > 2 {
            expected.push(Node::Posthoc);
        }
        assert_eq!(nodes, expected);
        let b = r.branch_decision();
        assert_eq!(route(b.normal, b.homoscedastic, b.k), r.branch);
        assert_eq!(r.rejects(), r.primary.p_value() < r.config.alpha);
        assert_eq!(r.posthoc.is_some(), r.trace.of(Node::Posthoc).count() == 1);
    }

    #[test]
    fn routing_table() {
        assert_eq!(route(true, true, 2), Branch::TTest);
        assert_eq!(route(true, true, 3), Branch::Anova);
        assert_eq!(route(true, false, 2), Branch::MannWhitney);
        assert_eq!(route(false, true, 2), Branch::MannWhitney);
        assert_eq!(route(true, false, 4), Branch::KruskalWallis);
        for h in [true, false] {
            assert_eq!(route(false, h, 3), Branch::KruskalWallis);
        }
    }

    #[test]
    fn difference_by_moment() {
        let r = table2(DIFFERENCE, MOMENT);
        check_trace(&r, 2);
        // Before fails Shapiro-Wilk (p = 0.009), so the rank branch is taken
        assert_eq!(r.branch, Branch::MannWhitney);
        assert!(r.trace.steps[2].informational);
        assert!((r.levene().p_value - 0.91252).abs() < 1e-4);
        assert!(r.rejects());
        assert!(r.trace.steps[3].outcome.contains("group Before"));
        assert_eq!(r.outliers.len(), 2);
    }

    #[test]
    fn expected_hours_by_moment() {
        let r = table2(EXPECTED_HOURS, MOMENT);
        check_trace(&r, 2);
        assert_eq!(r.branch, Branch::MannWhitney);
        assert!((r.levene().p_value - 0.005888).abs() < 1e-4);
        assert!(r.rejects());
    }

    #[test]
    fn difference_by_cases_size() {
        let r = table2(DIFFERENCE, CASES_SIZE);
        check_trace(&r, 3);
        assert_eq!(r.branch, Branch::Anova);
        assert!(!r.trace.steps[3].informational);
        assert!((r.primary.p_value() - 0.044623).abs() < 1e-5);
        let ph = r.posthoc.as_ref().unwrap();
        assert_eq!(ph.family_method, "tukey_hsd");
        assert!(ph.find("S", "L").unwrap().significant_at_alpha);
        // group S has three values: descriptives but no fences
        assert_eq!(r.per_group_descriptives.len(), 3);
        assert!(!r.outliers.contains_key("S"));
    }

    #[test]
    fn expected_hours_by_cases_size() {
        let r = table2(EXPECTED_HOURS, CASES_SIZE);
        check_trace(&r, 3);
        assert_eq!(r.branch, Branch::KruskalWallis);
        assert!((r.primary.p_value() - 0.011035182880231115).abs() < 1e-9);
        assert_eq!(r.posthoc.as_ref().unwrap().comparisons.len(), 3);
    }

    #[test]
    fn parametric_two_group_path() {
        let base: Vec<f64> = (1..=12)
            .map(|i| std_normal_quantile((i as f64 - 0.375) / 12.25).unwrap())
            .collect();
        let shifted: Vec<f64> = base.iter().map(|x| x * 1.1 + 2.0).collect();
        let g = GroupedSample::from_pairs("y", "f", [("a", base), ("b", shifted)]).unwrap();
        let r = analyze(&g, &EngineConfig::default()).unwrap();
        check_trace(&r, 2);
        assert_eq!(r.branch, Branch::TTest);
        assert!(r.rejects());
        assert_eq!(r.primary.as_test_result().method, "t_pooled");
        let w = analyze(&g, &EngineConfig { t_variant: TVariant::Welch, ..Default::default() }).unwrap();
        assert_eq!(w.primary.as_test_result().method, "t_welch");
    }

    #[test]
    fn config_and_size_errors() {
        let g = select_response_factor(&builtin_table2(), DIFFERENCE, MOMENT).unwrap();
        let bad = EngineConfig { alpha: 1.5, ..Default::default() };
        match analyze(&g, &bad) {
            Err(StatError::InvalidParameter(m)) => assert!(m.contains("alpha must be in (0,1)")),
            other => panic!("{other:?}"),
        }
        let tiny = GroupedSample::from_pairs("y", "f", [("a", vec![1.0, 2.0]), ("b", vec![1.0, 2.0, 3.0])]).unwrap();
        assert!(matches!(analyze(&tiny, &EngineConfig::default()), Err(StatError::InsufficientData { .. })));
    }

    #[test]
    fn deterministic_and_serializable() {
        let g = select_response_factor(&builtin_table2(), DIFFERENCE, CASES_SIZE).unwrap();
        let a = analyze(&g, &EngineConfig::default()).unwrap();
        let b = analyze(&g, &EngineConfig::default()).unwrap();
        assert_eq!(a, b);
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains(SCHEMA_VERSION));
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn trace_is_complete(
            groups in prop::collection::vec(prop::collection::vec(-100f64..100.0, 4..12), 2..4),
            alpha in 0.01f64..0.2,
        ) {
            let g = GroupedSample::from_pairs(
                "y", "f", groups.iter().enumerate().map(|(i, v)| (i.to_string(), v.clone()))).unwrap();
            let cfg = EngineConfig { alpha, ..Default::default() };
            if let Ok(r) = analyze(&g, &cfg) {
                check_trace(&r, g.k());
            }
        }
    }
}
