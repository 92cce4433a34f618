//! Central tendency, dispersion, quartile fences and boxplot statistics.
//!
//! Quantiles use the `(n + 1)·p` position with linear interpolation between
//! order statistics, clamped to the sample range.

use crate::dataset::Sample;
use crate::{StatError, StatResult};
use serde::{Deserialize, Serialize};

fn require(s: &Sample, needed: usize, what: &'static str) -> StatResult<()> {
    if s.is_empty() {
        return Err(StatError::EmptySample);
    }
    if s.len() < needed {
        return Err(StatError::InsufficientData {
            what,
            needed,
            got: s.len(),
        });
    }
    Ok(())
}

pub(crate) fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub(crate) fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sum of squared deviations from the mean (two-pass).
pub(crate) fn sum_sq_dev(values: &[f64]) -> f64 {
    let m = mean_of(values);
    values.iter().map(|x| (x - m) * (x - m)).sum()
}

pub fn mean(s: &Sample) -> StatResult<f64> {
    require(s, 1, "mean")?;
    Ok(mean_of(&s.values))
}

pub fn median(s: &Sample) -> StatResult<f64> {
    require(s, 1, "median")?;
    Ok(median_sorted(&sorted(&s.values)))
}

pub(crate) fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Every value attaining the largest multiplicity, provided it exceeds one.
/// All-distinct data has no mode and yields an empty list.
pub fn modes(s: &Sample) -> StatResult<Vec<f64>> {
    require(s, 1, "mode")?;
    let v = sorted(&s.values);
    let mut runs: Vec<(f64, usize)> = Vec::new();
    for x in v {
        match runs.last_mut() {
            Some((y, c)) if *y == x => *c += 1,
            _ => runs.push((x, 1)),
        }
    }
    let best = runs.iter().map(|r| r.1).max().unwrap_or(0);
    if best < 2 {
        return Ok(Vec::new());
    }
    Ok(runs.into_iter().filter(|r| r.1 == best).map(|r| r.0).collect())
}

/// Quantile at fraction `p` by `(n + 1)·p` interpolation.
pub fn percentile(s: &Sample, p: f64) -> StatResult<f64> {
    require(s, 1, "percentile")?;
    if !(0.0..=1.0).contains(&p) {
        return Err(StatError::Domain(format!("percentile fraction must lie in [0, 1], got {p}")));
    }
    Ok(percentile_sorted(&sorted(&s.values), p))
}

pub(crate) fn percentile_sorted(v: &[f64], p: f64) -> f64 {
    let n = v.len();
    let pos = (n as f64 + 1.0) * p;
    if pos <= 1.0 {
        return v[0];
    }
    if pos >= n as f64 {
        return v[n - 1];
    }
    let lower = pos.floor();
    let frac = pos - lower;
    let i = lower as usize - 1;
    v[i] + frac * (v[i + 1] - v[i])
}

/// Unbiased sample variance (`n - 1` denominator).
pub fn sample_variance(s: &Sample) -> StatResult<f64> {
    require(s, 2, "variance")?;
    Ok(sum_sq_dev(&s.values) / (s.len() as f64 - 1.0))
}

pub fn sample_stddev(s: &Sample) -> StatResult<f64> {
    Ok(sample_variance(s)?.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub modes: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    pub q1: f64,
    pub q3: f64,
    pub variance: f64,
    pub stddev: f64,
}

pub fn describe(s: &Sample) -> StatResult<DescriptiveSummary> {
    require(s, 2, "descriptive summary")?;
    let v = sorted(&s.values);
    let n = v.len();
    let variance = sum_sq_dev(&v) / (n as f64 - 1.0);
    Ok(DescriptiveSummary {
        n,
        mean: mean_of(&v),
        median: median_sorted(&v),
        modes: modes(s)?,
        min: v[0],
        max: v[n - 1],
        range: v[n - 1] - v[0],
        q1: percentile_sorted(&v, 0.25),
        q3: percentile_sorted(&v, 0.75),
        variance,
        stddev: variance.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fences {
    pub low: f64,
    pub high: f64,
}

/// Quartile-fence outlier classification. `l` is the interquartile spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub q1: f64,
    pub q3: f64,
    pub l: f64,
    pub inner_fences: Fences,
    pub outer_fences: Fences,
    pub mild: Vec<f64>,
    pub extreme: Vec<f64>,
}

impl OutlierReport {
    pub fn is_empty(&self) -> bool {
        self.mild.is_empty() && self.extreme.is_empty()
    }
}

/// Values between the 1.5L and 3L fences are mild, values beyond 3L are
/// extreme. A value lying exactly on a fence counts as inside it.
pub fn classify_outliers(s: &Sample) -> StatResult<OutlierReport> {
    require(s, 4, "outlier classification")?;
    let v = sorted(&s.values);
    let q1 = percentile_sorted(&v, 0.25);
    let q3 = percentile_sorted(&v, 0.75);
    let l = q3 - q1;
    let inner = Fences {
        low: q1 - 1.5 * l,
        high: q3 + 1.5 * l,
    };
    let outer = Fences {
        low: q1 - 3.0 * l,
        high: q3 + 3.0 * l,
    };
    let mut mild = Vec::new();
    let mut extreme = Vec::new();
    for &x in &v {
        if x < outer.low || x > outer.high {
            extreme.push(x);
        } else if x < inner.low || x > inner.high {
            mild.push(x);
        }
    }
    Ok(OutlierReport {
        q1,
        q3,
        l,
        inner_fences: inner,
        outer_fences: outer,
        mild,
        extreme,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub label: String,
    pub n: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub flagged_points: Vec<f64>,
}

/// Whiskers reach the most extreme observations inside the inner fences.
pub fn boxplot_stats(s: &Sample) -> StatResult<BoxplotStats> {
    let report = classify_outliers(s)?;
    let v = sorted(&s.values);
    let inside = |x: &&f64| **x >= report.inner_fences.low && **x <= report.inner_fences.high;
    // the quartiles always sit inside the fences, so both searches succeed
    let whisker_low = *v.iter().find(inside).expect("q1 lies within the fences");
    let whisker_high = *v.iter().rev().find(inside).expect("q3 lies within the fences");
    let flagged_points = v
        .iter()
        .copied()
        .filter(|&x| x < whisker_low || x > whisker_high)
        .collect();
    Ok(BoxplotStats {
        label: s.label.clone(),
        n: v.len(),
        q1: report.q1,
        median: median_sorted(&v),
        q3: report.q3,
        whisker_low,
        whisker_high,
        flagged_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{builtin_table2, select_response_factor, DIFFERENCE, MOMENT};
    use proptest::prelude::*;

    fn s(v: &[f64]) -> Sample {
        Sample::from(v)
    }

    fn difference() -> Sample {
        builtin_table2().sample(DIFFERENCE).unwrap()
    }

    fn one_decimal(x: f64) -> f64 {
        (x * 10.0).round() / 10.0
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(mean(&s(&[5.0])).unwrap(), 5.0);
        assert_eq!(mean(&s(&[-1.0, 1.0])).unwrap(), 0.0);
        assert_eq!(median(&s(&[3.0, 1.0, 2.0])).unwrap(), 2.0);
        assert_eq!(median(&s(&[1.0, 2.0, 3.0, 4.0])).unwrap(), 2.5);
        assert_eq!(modes(&s(&[1.0, 1.0, 2.0])).unwrap(), vec![1.0]);
        assert_eq!(modes(&s(&[1.0, 1.0, 2.0, 2.0])).unwrap(), vec![1.0, 2.0]);
        assert_eq!(sample_variance(&s(&[4.2, 4.2, 4.2])).unwrap(), 0.0);
        let d = describe(&s(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        assert_eq!((d.min, d.max, d.range, d.median), (1.0, 4.0, 3.0, 2.5));
    }

    #[test]
    fn errors() {
        assert_eq!(mean(&s(&[])), Err(StatError::EmptySample));
        assert_eq!(median(&s(&[])), Err(StatError::EmptySample));
        assert_eq!(modes(&s(&[])), Err(StatError::EmptySample));
        assert!(matches!(sample_variance(&s(&[1.0])), Err(StatError::InsufficientData { .. })));
        assert!(percentile(&s(&[1.0]), 1.2).is_err());
        assert!(percentile(&s(&[1.0]), -0.1).is_err());
        assert!(describe(&s(&[1.0])).is_err());
        assert!(classify_outliers(&s(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn table3_values() {
        let d = describe(&difference()).unwrap();
        assert_eq!(one_decimal(d.mean), 33.6);
        assert_eq!(one_decimal(d.median), -26.4);
        assert!(d.modes.is_empty());
        assert_eq!(one_decimal(d.range), 531.7);
        assert_eq!(one_decimal(d.min), -221.3);
        assert_eq!(one_decimal(d.max), 310.5);
        assert_eq!(one_decimal(d.q1), -166.9);
        assert_eq!(one_decimal(d.q3), 237.8);
        assert_eq!(one_decimal(d.stddev), 200.6);
        assert!((d.variance / 40244.0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn table3_variance_by_exact_decimal_arithmetic() {
        // Values in thousandths are integers, so the sums are exact in i128.
        let milli: Vec<i128> = difference()
            .values
            .iter()
            .map(|x| (x * 1000.0).round() as i128)
            .collect();
        let n = milli.len() as i128;
        let sum: i128 = milli.iter().sum();
        let sum_sq: i128 = milli.iter().map(|x| x * x).sum();
        // variance * 1e6 * n * (n - 1) = n Σx² - (Σx)²
        let num = n * sum_sq - sum * sum;
        let oracle = num as f64 / (n * (n - 1)) as f64 / 1e6;
        let got = sample_variance(&difference()).unwrap();
        assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
        assert!((oracle - 40_243.980_828_65).abs() < 1e-6);
    }

    #[test]
    fn quartile_positions() {
        // n = 16: Q1 at position 4.25, Q3 at 12.75
        let v = sorted(&difference().values);
        let q1 = v[3] + 0.25 * (v[4] - v[3]);
        let q3 = v[11] + 0.75 * (v[12] - v[11]);
        assert_eq!(percentile(&difference(), 0.25).unwrap(), q1);
        assert_eq!(percentile(&difference(), 0.75).unwrap(), q3);
    }

    #[test]
    fn difference_by_moment_has_no_extreme_outliers() {
        let g = select_response_factor(&builtin_table2(), DIFFERENCE, MOMENT).unwrap();
        for grp in g.groups() {
            let r = classify_outliers(grp).unwrap();
            assert!(r.extreme.is_empty(), "{}", grp.label);
        }
        // 2014/07 is the only positive difference before the change:
        // Q1 = -204.399, Q3 = -63.846, so Q3 + 1.5L = 146.98 < 223.505 < Q3 + 3L
        let before = classify_outliers(g.group("Before").unwrap()).unwrap();
        assert_eq!(before.mild.len(), 1);
        assert!((before.mild[0] - 223.505).abs() < 1e-9);
        assert!(classify_outliers(g.group("After").unwrap()).unwrap().is_empty());
        let after = g.group("After").unwrap();
        assert!(boxplot_stats(after).unwrap().median > 0.0);
    }

    #[test]
    fn extreme_point() {
        // sorted [1,2,3,4,1000]: Q1 at 1.5 -> 1.5, Q3 at 4.5 -> 502, L = 500.5
        // inner high = 502 + 750.75 = 1252.75, so 1000 is inside the fences.
        let r = classify_outliers(&s(&[1.0, 2.0, 3.0, 4.0, 1000.0])).unwrap();
        assert_eq!((r.q1, r.q3, r.l), (1.5, 502.0, 500.5));
        assert!(r.is_empty());
        let mut v: Vec<f64> = (1..=20).map(f64::from).collect();
        v.push(1000.0);
        let r = classify_outliers(&s(&v)).unwrap();
        // Q1 = 5.5, Q3 = 16.5, L = 11, outer high = 49.5
        assert_eq!((r.q1, r.q3, r.l), (5.5, 16.5, 11.0));
        assert_eq!(r.extreme, vec![1000.0]);
        assert!(r.mild.is_empty());
    }

    #[test]
    fn constant_sample_is_degenerate() {
        let c = s(&[7.0; 6]);
        let r = classify_outliers(&c).unwrap();
        assert_eq!(r.l, 0.0);
        assert!(r.is_empty());
        let b = boxplot_stats(&c).unwrap();
        assert_eq!([b.q1, b.median, b.q3, b.whisker_low, b.whisker_high], [7.0; 5]);
        assert!(b.flagged_points.is_empty());
    }

    #[test]
    fn one_to_hundred_whiskers() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let b = boxplot_stats(&s(&v)).unwrap();
        assert_eq!((b.whisker_low, b.whisker_high), (1.0, 100.0));
        assert!(b.flagged_points.is_empty());
    }

    #[test]
    fn median_matches_exhaustive_oracle() {
        // every sample of size 1..=6 over {0,1,2,3}
        for n in 1..=6u32 {
            for code in 0..4usize.pow(n) {
                let mut c = code;
                let v: Vec<f64> = (0..n)
                    .map(|_| {
                        let d = c % 4;
                        c /= 4;
                        d as f64
                    })
                    .collect();
                // selection-sort oracle
                let mut o = v.clone();
                for i in 0..o.len() {
                    for j in i + 1..o.len() {
                        if o[j] < o[i] {
                            o.swap(i, j);
                        }
                    }
                }
                let m = o.len();
                let mid = if m % 2 == 1 { o[m / 2] } else { (o[m / 2 - 1] + o[m / 2]) / 2.0 };
                assert_eq!(median(&s(&v)).unwrap(), mid);
                assert_eq!(percentile(&s(&v), 0.5).unwrap(), mid);
            }
        }
    }

    fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e3f64..1e3, 4..40)
    }

    proptest! {
        #[test]
        fn ordering_invariant(v in sample_strategy()) {
            let d = describe(&s(&v)).unwrap();
            prop_assert!(d.min <= d.q1 && d.q1 <= d.median && d.median <= d.q3 && d.q3 <= d.max);
            prop_assert_eq!(d.range, d.max - d.min);
            prop_assert!(d.variance >= 0.0);
            prop_assert_eq!(d.stddev, d.variance.sqrt());
        }

        #[test]
        fn shift_equivariance(v in sample_strategy(), c in -1e3f64..1e3) {
            let a = describe(&s(&v)).unwrap();
            let b = describe(&s(&v).map(|x| x + c)).unwrap();
            let tol = 1e-9 * (1.0 + c.abs() + a.max.abs().max(a.min.abs()));
            for (x, y) in [(a.mean, b.mean), (a.median, b.median), (a.min, b.min), (a.max, b.max), (a.q1, b.q1), (a.q3, b.q3)] {
                prop_assert!((x + c - y).abs() < tol);
            }
            prop_assert!((a.variance - b.variance).abs() < 1e-6 * (1.0 + a.variance));
            prop_assert!((a.range - b.range).abs() < tol);
        }

        #[test]
        fn scale_equivariance(v in sample_strategy(), k in 0.01f64..100.0) {
            let a = describe(&s(&v)).unwrap();
            let b = describe(&s(&v).map(|x| x * k)).unwrap();
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs()));
            prop_assert!(close(a.mean * k, b.mean));
            prop_assert!(close(a.median * k, b.median));
            prop_assert!(close(a.q1 * k, b.q1));
            prop_assert!(close(a.q3 * k, b.q3));
            prop_assert!(close(a.variance * k * k, b.variance));
            prop_assert!(close(a.stddev * k, b.stddev));
            prop_assert!(close(a.range * k, b.range));
        }

        #[test]
        fn outliers_permutation_invariant(v in sample_strategy(), seed in any::<u64>()) {
            let mut w = v.clone();
            // deterministic shuffle
            let mut state = seed;
            for i in (1..w.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                w.swap(i, j);
            }
            prop_assert_eq!(classify_outliers(&s(&v)).unwrap(), classify_outliers(&s(&w)).unwrap());
        }

        #[test]
        fn boxplot_invariants(v in sample_strategy()) {
            let b = boxplot_stats(&s(&v)).unwrap();
            let r = classify_outliers(&s(&v)).unwrap();
            prop_assert!(b.whisker_low >= r.inner_fences.low && b.whisker_high <= r.inner_fences.high);
            let outside: Vec<f64> = sorted(&v).into_iter().filter(|&x| x < b.whisker_low || x > b.whisker_high).collect();
            prop_assert_eq!(&b.flagged_points, &outside);
            for x in r.mild.iter().chain(r.extreme.iter()) {
                prop_assert!(*x < r.inner_fences.low || *x > r.inner_fences.high);
                prop_assert!(!(r.mild.contains(x) && r.extreme.contains(x)));
            }
        }
    }
}
