//! Text rendering. Statistics print with 3 decimals and p-values floor at `p < 0.001`.

use serde::Serialize;
use stattree_core::descriptive::{BoxplotStats, DescriptiveSummary, OutlierReport};
use stattree_core::engine::{AnalysisReport, Evidence, TraceStep};
use stattree_core::location::PairwiseResults;
use stattree_core::montecarlo::ErrorRateReport;
use stattree_core::{Df, TestResult};
use std::fmt::Write;

#[derive(Serialize)]
pub struct ColumnSummary<'a> {
    pub column: &'a str,
    #[serde(flatten)]
    pub summary: &'a DescriptiveSummary,
}

#[derive(Serialize)]
pub struct GroupOutliers<'a> {
    pub label: &'a str,
    #[serde(flatten)]
    pub report: OutlierReport,
}

pub fn num(x: f64) -> String {
    format!("{x:.3}")
}

/// `p = 0.011` or `p < 0.001`.
pub fn p_eq(p: f64) -> String {
    if p < 0.001 {
        "p < 0.001".to_string()
    } else {
        format!("p = {p:.3}")
    }
}

fn dfn(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        num(x)
    }
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| num(x)).collect();
    format!("[{}]", items.join(", "))
}

fn df(d: &Option<Df>) -> String {
    match d {
        Some(Df::One(a)) => format!(", df = {}", dfn(*a)),
        Some(Df::Pair(a, b)) => format!(", df = ({}, {})", dfn(*a), dfn(*b)),
        None => String::new(),
    }
}

fn test_line(t: &TestResult) -> String {
    format!(
        "{}: {} = {}{}, {}",
        t.method,
        t.statistic_name,
        num(t.statistic),
        df(&t.df),
        p_eq(t.p_value)
    )
}

pub fn describe(s: &ColumnSummary) -> String {
    let d = s.summary;
    let mut rows = vec![
        ("N", d.n.to_string()),
        ("MEAN", num(d.mean)),
        ("MEDIAN", num(d.median)),
        ("NUMBER OF MODES", d.modes.len().to_string()),
    ];
    if !d.modes.is_empty() {
        rows.push(("MODES", list(&d.modes)));
    }
    rows.extend([
        ("RANGE", num(d.range)),
        ("MINIMUM", num(d.min)),
        ("MAXIMUM", num(d.max)),
        ("1ST QUARTILE", num(d.q1)),
        ("3RD QUARTILE", num(d.q3)),
        ("VARIANCE", num(d.variance)),
        ("STANDARD DEVIATION", num(d.stddev)),
    ]);
    let mut out = format!("{}\n", s.column);
    for (k, v) in rows {
        let _ = writeln!(out, "  {k:<20} {v:>14}");
    }
    out
}

pub fn outliers(groups: &[GroupOutliers]) -> String {
    let mut out = String::new();
    for g in groups {
        let r = &g.report;
        let _ = writeln!(
            out,
            "{}: Q1 = {}, Q3 = {}, L = {}\n  inner fences [{}, {}], outer fences [{}, {}]\n  mild {}\n  extreme {}",
            g.label,
            num(r.q1),
            num(r.q3),
            num(r.l),
            num(r.inner_fences.low),
            num(r.inner_fences.high),
            num(r.outer_fences.low),
            num(r.outer_fences.high),
            list(&r.mild),
            list(&r.extreme),
        );
    }
    out
}

pub fn boxplot(stats: &[BoxplotStats]) -> String {
    let mut out = format!(
        "{:<12} {:>4} {:>12} {:>12} {:>12} {:>12} {:>12}  flagged\n",
        "group", "n", "whisker_lo", "q1", "median", "q3", "whisker_hi"
    );
    for b in stats {
        let _ = writeln!(
            out,
            "{:<12} {:>4} {:>12} {:>12} {:>12} {:>12} {:>12}  {}",
            b.label,
            b.n,
            num(b.whisker_low),
            num(b.q1),
            num(b.median),
            num(b.q3),
            num(b.whisker_high),
            list(&b.flagged_points)
        );
    }
    out
}

fn pairwise(out: &mut String, p: &PairwiseResults) {
    let _ = writeln!(out, "    {} (threshold {}):", p.family_method, num(p.alpha));
    for c in &p.comparisons {
        let _ = writeln!(
            out,
            "      {}-{}: estimate = {}, statistic = {}, {}{}",
            c.label_a,
            c.label_b,
            num(c.estimate),
            num(c.statistic),
            p_eq(c.p_value),
            if c.significant_at_alpha { "  *" } else { "" }
        );
    }
}

fn step(out: &mut String, s: &TraceStep) {
    let node = serde_json::to_value(s.node).ok();
    let node = node.as_ref().and_then(|v| v.as_str()).unwrap_or("?");
    let group = s.group.as_deref().map(|g| format!(" {g}")).unwrap_or_default();
    let info = if s.informational { " (informational)" } else { "" };
    let _ = writeln!(out, "  [{node}]{group}{info} {}", s.outcome);
    match &s.evidence {
        Evidence::Test(t) => {
            let _ = writeln!(out, "    {}", test_line(t));
        }
        Evidence::Anova(a) => {
            let _ = writeln!(
                out,
                "    anova: SS between = {}, SS within = {}, MS between = {}, MS within = {}\n    F = {}, df = ({}, {}), {}",
                num(a.ss_between),
                num(a.ss_within),
                num(a.ms_between),
                num(a.ms_within),
                num(a.f),
                dfn(a.df_between),
                dfn(a.df_within),
                p_eq(a.p_value)
            );
        }
        Evidence::Branch(b) => {
            let _ = writeln!(out, "    normal = {}, homoscedastic = {}, k = {}", b.normal, b.homoscedastic, b.k);
        }
        Evidence::Pairwise(p) => pairwise(out, p),
    }
}

pub fn analysis(r: &AnalysisReport) -> String {
    let mut out = format!(
        "{} by {} (alpha = {})\n  H0: {}\n  H1: {}\n\nDescriptives\n",
        r.response, r.factor, r.config.alpha, r.hypotheses.h0, r.hypotheses.h1
    );
    let _ = writeln!(
        out,
        "  {:<12} {:>4} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "group", "n", "mean", "median", "stddev", "q1", "q3"
    );
    for (label, d) in &r.per_group_descriptives {
        let _ = writeln!(
            out,
            "  {:<12} {:>4} {:>12} {:>12} {:>12} {:>12} {:>12}",
            label,
            d.n,
            num(d.mean),
            num(d.median),
            num(d.stddev),
            num(d.q1),
            num(d.q3)
        );
    }
    out.push_str("\nOutliers\n");
    for label in r.per_group_descriptives.keys() {
        match r.outliers.get(label) {
            Some(o) => {
                let _ = writeln!(out, "  {label}: mild {}, extreme {}", list(&o.mild), list(&o.extreme));
            }
            None => {
                let _ = writeln!(out, "  {label}: too few values for fences");
            }
        }
    }
    out.push_str("\nDecision trace\n");
    for s in &r.trace.steps {
        step(&mut out, s);
    }
    let verdict = if r.rejects() { "reject H0" } else { "fail to reject H0" };
    let _ = writeln!(
        out,
        "\nConclusion: {verdict} ({}, {})",
        r.branch.label(),
        p_eq(r.conclusion.p_value)
    );
    out
}

pub fn validation(r: &ErrorRateReport) -> String {
    let measure = match r.truth {
        stattree_core::montecarlo::Truth::Null => "type I error rate",
        stattree_core::montecarlo::Truth::Alternative => "rejection rate",
    };
    let mut out = format!(
        "{}: {measure} {} ± {} over {} replications ({} rejections, alpha = {})\n",
        r.test,
        num(r.rate),
        num(r.ci_halfwidth),
        r.replications,
        r.rejections,
        r.target_alpha
    );
    if r.failures > 0 {
        let _ = writeln!(out, "  {} replications could not be computed", r.failures);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_floor() {
        assert_eq!(p_eq(0.0004), "p < 0.001");
        assert_eq!(p_eq(0.001), "p = 0.001");
        assert_eq!(p_eq(0.91252), "p = 0.913");
        assert_eq!(num(-26.428), "-26.428");
        assert_eq!(p_eq(1e-7), "p < 0.001");
        assert_eq!(p_eq(0.0110352), "p = 0.011");
        assert_eq!(dfn(14.0), "14");
        assert_eq!(dfn(13.96), "13.960");
    }
}
