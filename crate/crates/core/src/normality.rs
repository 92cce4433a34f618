//! Normality tests and the per-group dispatch between them.

use crate::dataset::{GroupedSample, Sample};
use crate::descriptive::{mean_of, sorted, sum_sq_dev};
use crate::special::{normal, std_normal_quantile};
use crate::{StatError, StatResult, TestResult};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub const SHAPIRO_WILK: &str = "shapiro_wilk";
pub const KS_NORMAL: &str = "ks_normal";
pub const KS_LILLIEFORS: &str = "ks_lilliefors";

/// Groups smaller than this are tested with Shapiro-Wilk.
pub const DEFAULT_SIZE_THRESHOLD: usize = 30;

const SW_MAX_N: usize = 5000;

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Shapiro-Wilk coefficients for the lower half of the order statistics
/// (Royston's polynomial approximation), positive and summing in square to 1/2.
fn sw_coefficients(n: usize) -> StatResult<Vec<f64>> {
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
    let half = n / 2;
    if n == 3 {
        return Ok(vec![std::f64::consts::FRAC_1_SQRT_2]);
    }
    let an25 = n as f64 + 0.25;
    let mut m = Vec::with_capacity(half);
    for i in 1..=half {
        m.push(std_normal_quantile((i as f64 - 0.375) / an25)?);
    }
    let summ2 = 2.0 * m.iter().map(|x| x * x).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    let mut a = vec![0.0; half];
    a[0] = a1;
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in first..half {
        a[i] = -m[i] / fac;
    }
    Ok(a)
}

/// Shapiro-Wilk W with Royston's (1995) p-value approximation, 3 <= n <= 5000.
pub fn shapiro_wilk(s: &Sample) -> StatResult<TestResult> {
    let n = s.len();
    if n < 3 || n > SW_MAX_N {
        return Err(if n < 3 {
            StatError::InsufficientData {
                what: "Shapiro-Wilk",
                needed: 3,
                got: n,
            }
        } else {
            StatError::InvalidParameter(format!("Shapiro-Wilk supports n <= {SW_MAX_N}, got {n}"))
        });
    }
    let x = sorted(&s.values);
    let range = x[n - 1] - x[0];
    if !(range > 0.0) || !range.is_finite() {
        return Err(StatError::ZeroVariance("Shapiro-Wilk"));
    }
    let half = sw_coefficients(n)?;

    // Full antisymmetric coefficient vector, then W as the squared
    // correlation; 1 - W is formed directly to avoid cancellation near 1.
    let mut coef = vec![0.0; n];
    for (i, &a) in half.iter().enumerate() {
        coef[i] = -a;
        coef[n - 1 - i] = a;
    }
    let xs: Vec<f64> = x.iter().map(|v| v / range).collect();
    let (ma, mx) = (mean_of(&coef), mean_of(&xs));
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (a, v) in coef.iter().zip(&xs) {
        let (da, dx) = (a - ma, v - mx);
        ssa += da * da;
        ssx += dx * dx;
        sax += da * dx;
    }
    let root = (ssa * ssx).sqrt();
    let w1 = (root - sax) * (root + sax) / (ssa * ssx);
    let w = 1.0 - w1;

    let p = sw_p_value(w, w1, n);
    Ok(TestResult::new(SHAPIRO_WILK, "W", w, None, p, vec![n]))
}

fn sw_p_value(w: f64, w1: f64, n: usize) -> f64 {
    const G: [f64; 2] = [-2.273, 0.459];
    const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];

    if n == 3 {
        // exact distribution for n = 3
        let six_over_pi = 6.0 / std::f64::consts::PI;
        let p = six_over_pi * (w.sqrt().min(1.0).asin() - std::f64::consts::FRAC_PI_3);
        return p.clamp(0.0, 1.0);
    }
    if w1 <= 0.0 {
        return 1.0;
    }
    let an = n as f64;
    let mut y = w1.ln();
    let (m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let xx = an.ln();
        (poly(&C5, xx), poly(&C6, xx).exp())
    };
    normal::phi_c((y - m) / s)
}

/// One-sample Kolmogorov-Smirnov distance to a normal with the sample's
/// mean and standard deviation.
fn ks_distance(s: &Sample) -> StatResult<f64> {
    let n = s.len();
    if n < 4 {
        return Err(StatError::InsufficientData {
            what: "Kolmogorov-Smirnov",
            needed: 4,
            got: n,
        });
    }
    let x = sorted(&s.values);
    let mean = mean_of(&x);
    let sd = (sum_sq_dev(&x) / (n as f64 - 1.0)).sqrt();
    if !(sd > 0.0) {
        return Err(StatError::ZeroVariance("Kolmogorov-Smirnov"));
    }
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, v) in x.iter().enumerate() {
        let f = normal::phi((v - mean) / sd);
        let above = (i as f64 + 1.0) / nf - f;
        let below = f - i as f64 / nf;
        d = d.max(above).max(below);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// Survival function of the limiting Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // Jacobi-theta form converges fast for small arguments.
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=20)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (c * m * m).exp()
            })
            .sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Dallal-Wilkinson approximation to the Lilliefors p-value. Tight below 0.1,
/// which is where normality decisions are made; larger values are indicative.
pub fn lilliefors_p_value(d: f64, n: usize) -> f64 {
    let (d, nf) = if n > 100 {
        (d * (n as f64 / 100.0).powf(0.49), 100.0)
    } else {
        (d, n as f64)
    };
    let p = (-7.01256 * d * d * (nf + 2.78019) + 2.99587 * d * (nf + 2.78019).sqrt() - 0.122119
        + 0.974598 / nf.sqrt()
        + 1.67997 / nf)
        .exp();
    p.clamp(0.0, 1.0)
}

/// Asymptotic Lilliefors critical value for `alpha` in {0.20, 0.15, 0.10, 0.05, 0.01}.
pub fn lilliefors_critical_value(n: usize, alpha: f64) -> Option<f64> {
    const TABLE: [(f64, f64); 5] = [(0.20, 0.736), (0.15, 0.768), (0.10, 0.805), (0.05, 0.886), (0.01, 1.031)];
    TABLE
        .iter()
        .find(|(a, _)| (a - alpha).abs() < 1e-12)
        .map(|(_, c)| c / (n as f64).sqrt())
}

/// Kolmogorov-Smirnov test against a normal with estimated parameters.
///
/// The plain asymptotic p-value ignores that the parameters were estimated
/// and so overstates p; pass `lilliefors = true` for the corrected p-value.
pub fn ks_normal_with(s: &Sample, lilliefors: bool) -> StatResult<TestResult> {
    let d = ks_distance(s)?;
    let n = s.len();
    let (method, p) = if lilliefors {
        (KS_LILLIEFORS, lilliefors_p_value(d, n))
    } else {
        (KS_NORMAL, kolmogorov_sf((n as f64).sqrt() * d))
    };
    Ok(TestResult::new(method, "D", d, None, p, vec![n]))
}

pub fn ks_normal(s: &Sample) -> StatResult<TestResult> {
    ks_normal_with(s, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityOptions {
    pub size_threshold: usize,
    pub lilliefors: bool,
}

impl Default for NormalityOptions {
    fn default() -> Self {
        Self {
            size_threshold: DEFAULT_SIZE_THRESHOLD,
            lilliefors: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityDecision {
    pub per_group: IndexMap<String, TestResult>,
    /// The method used for every group, or `"mixed"` when group sizes straddle the threshold.
    pub chosen_method: String,
    pub alpha: f64,
    pub all_normal: bool,
}

/// Tests each group: Shapiro-Wilk when `n < size_threshold`, otherwise KS.
pub fn normality_check(
    g: &GroupedSample,
    alpha: f64,
    size_threshold: usize,
) -> StatResult<NormalityDecision> {
    normality_check_with(
        g,
        alpha,
        &NormalityOptions {
            size_threshold,
            ..Default::default()
        },
    )
}

pub fn normality_check_with(
    g: &GroupedSample,
    alpha: f64,
    opts: &NormalityOptions,
) -> StatResult<NormalityDecision> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatError::InvalidParameter(format!("alpha must be in (0,1), got {alpha}")));
    }
    let mut per_group = IndexMap::new();
    for grp in g.groups() {
        let r = if grp.len() < opts.size_threshold {
            shapiro_wilk(grp)?
        } else {
            ks_normal_with(grp, opts.lilliefors)?
        };
        per_group.insert(grp.label.clone(), r);
    }
    let first = &per_group[0].method;
    let chosen_method = if per_group.values().all(|r| &r.method == first) {
        first.clone()
    } else {
        "mixed".to_string()
    };
    let all_normal = per_group.values().all(|r| r.p_value >= alpha);
    Ok(NormalityDecision {
        per_group,
        chosen_method,
        alpha,
        all_normal,
    })
}
