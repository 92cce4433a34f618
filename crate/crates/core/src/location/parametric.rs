use super::{check_alpha, Comparison, PairwiseResults, ANOVA, TUKEY_HSD, T_POOLED, T_WELCH};
use crate::dataset::{GroupedSample, Sample};
use crate::descriptive::{mean_of, sum_sq_dev};
use crate::special::{f_sf, student_t_two_sided_p, studentized_range_sf};
use crate::{Df, StatError, StatResult, TestResult};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TVariant {
    #[default]
    Pooled,
    Welch,
}

fn need(s: &Sample, n: usize, what: &'static str) -> StatResult<()> {
    if s.len() < n {
        return Err(StatError::InsufficientData {
            what,
            needed: n,
            got: s.len(),
        });
    }
    Ok(())
}

/// Two-sided independent-samples t test.
pub fn two_sample_t(a: &Sample, b: &Sample, variant: TVariant) -> StatResult<TestResult> {
    need(a, 2, "t test")?;
    need(b, 2, "t test")?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let diff = mean_of(&a.values) - mean_of(&b.values);
    let va = sum_sq_dev(&a.values) / (na - 1.0);
    let vb = sum_sq_dev(&b.values) / (nb - 1.0);
    let (method, se2, df) = match variant {
        TVariant::Pooled => {
            let sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
            (T_POOLED, sp2 * (1.0 / na + 1.0 / nb), na + nb - 2.0)
        }
        TVariant::Welch => {
            let (qa, qb) = (va / na, vb / nb);
            let se2 = qa + qb;
            let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
            (T_WELCH, se2, df)
        }
    };
    if !(se2 > 0.0) {
        return Err(StatError::ZeroVariance("t test"));
    }
    let t = diff / se2.sqrt();
    let p = student_t_two_sided_p(t, df)?;
    Ok(TestResult::new(method, "t", t, Some(Df::One(df)), p, vec![a.len(), b.len()]))
}

/// Between/within decomposition shared by ANOVA and Levene.
pub(crate) struct OneWayParts {
    pub means: Vec<f64>,
    pub ss_between: f64,
    pub ss_within: f64,
    pub df_between: f64,
    pub df_within: f64,
}

pub(crate) fn one_way_parts(groups: &[&[f64]]) -> OneWayParts {
    let total: usize = groups.iter().map(|g| g.len()).sum();
    let means: Vec<f64> = groups.iter().map(|g| mean_of(g)).collect();
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / total as f64;
    let ss_between = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.len() as f64 * (m - grand) * (m - grand))
        .sum();
    let ss_within = groups.iter().map(|g| sum_sq_dev(g)).sum();
    OneWayParts {
        means,
        ss_between,
        ss_within,
        df_between: (groups.len() - 1) as f64,
        df_within: (total - groups.len()) as f64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub ss_between: f64,
    pub ss_within: f64,
    pub df_between: f64,
    pub df_within: f64,
    pub ms_between: f64,
    pub ms_within: f64,
    pub f: f64,
    pub p_value: f64,
    pub group_means: IndexMap<String, f64>,
    pub n_per_group: Vec<usize>,
}

impl AnovaResult {
    pub fn to_test_result(&self) -> TestResult {
        TestResult::new(
            ANOVA,
            "F",
            self.f,
            Some(Df::Pair(self.df_between, self.df_within)),
            self.p_value,
            self.n_per_group.clone(),
        )
    }
}

/// Fixed-effects one-way analysis of variance.
pub fn one_way_anova(g: &GroupedSample) -> StatResult<AnovaResult> {
    for s in g.groups() {
        need(s, 2, "one-way ANOVA")?;
    }
    let views: Vec<&[f64]> = g.groups().iter().map(|s| s.values.as_slice()).collect();
    let parts = one_way_parts(&views);
    if !(parts.ss_within > 0.0) {
        return Err(StatError::ZeroVariance("one-way ANOVA"));
    }
    let ms_between = parts.ss_between / parts.df_between;
    let ms_within = parts.ss_within / parts.df_within;
    let f = ms_between / ms_within;
    let p_value = f_sf(f, parts.df_between, parts.df_within)?;
    Ok(AnovaResult {
        ss_between: parts.ss_between,
        ss_within: parts.ss_within,
        df_between: parts.df_between,
        df_within: parts.df_within,
        ms_between,
        ms_within,
        f,
        p_value,
        group_means: g
            .groups()
            .iter()
            .zip(&parts.means)
            .map(|(s, &m)| (s.label.clone(), m))
            .collect(),
        n_per_group: g.sizes(),
    })
}

/// Tukey-Kramer honestly-significant-difference comparisons.
pub fn tukey_hsd(g: &GroupedSample, alpha: f64) -> StatResult<PairwiseResults> {
    check_alpha(alpha)?;
    let a = one_way_anova(g)?;
    let k = g.k();
    let groups = g.groups();
    let mut comparisons = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let (mi, mj) = (a.group_means[i], a.group_means[j]);
            let (ni, nj) = (groups[i].len() as f64, groups[j].len() as f64);
            let se = (a.ms_within / 2.0 * (1.0 / ni + 1.0 / nj)).sqrt();
            let q = (mi - mj).abs() / se;
            let p = studentized_range_sf(q, k, a.df_within)?;
            comparisons.push(Comparison {
                label_a: groups[i].label.clone(),
                label_b: groups[j].label.clone(),
                estimate: mi - mj,
                statistic: q,
                p_value: p,
                significant_at_alpha: p < alpha,
            });
        }
    }
    Ok(PairwiseResults {
        comparisons,
        family_method: TUKEY_HSD.to_string(),
        alpha,
    })
}
