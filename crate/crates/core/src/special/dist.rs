use super::gamma::{beta_inc, gamma_pq, ln_beta, ln_gamma};
use super::{check_finite, check_positive, Tolerance};
use crate::{StatError, StatResult};

fn check_non_negative(name: &str, x: f64) -> StatResult<()> {
    check_finite(name, x)?;
    if x < 0.0 {
        return Err(StatError::Domain(format!("{name} must be non-negative, got {x}")));
    }
    Ok(())
}

/// Student-t CDF with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> StatResult<f64> {
    check_finite("t", t)?;
    check_positive("df", df)?;
    let tail = 0.5 * two_sided(t, df)?;
    Ok(if t >= 0.0 { 1.0 - tail } else { tail })
}

/// `P(|T| >= |t|)` for T Student-t with `df` degrees of freedom.
pub fn student_t_two_sided_p(t: f64, df: f64) -> StatResult<f64> {
    check_finite("t", t)?;
    check_positive("df", df)?;
    two_sided(t, df)
}

fn two_sided(t: f64, df: f64) -> StatResult<f64> {
    let t2 = t * t;
    let denom = df + t2;
    // P(|T| > t) = I_{ν/(ν+t²)}(ν/2, 1/2)
    beta_inc(0.5 * df, 0.5, df / denom, t2 / denom, Tolerance::CDF)
}

pub fn student_t_pdf(t: f64, df: f64) -> StatResult<f64> {
    check_finite("t", t)?;
    check_positive("df", df)?;
    let ln = -0.5 * (df + 1.0) * (t * t / df).ln_1p() - 0.5 * df.ln() - ln_beta(0.5 * df, 0.5);
    Ok(ln.exp())
}

/// F distribution CDF with `(d1, d2)` degrees of freedom.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> StatResult<f64> {
    let (p, _) = f_both(x, d1, d2)?;
    Ok(p)
}

/// Upper tail of the F distribution, computed without `1 - cdf` cancellation.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> StatResult<f64> {
    let (_, q) = f_both(x, d1, d2)?;
    Ok(q)
}

fn f_both(x: f64, d1: f64, d2: f64) -> StatResult<(f64, f64)> {
    check_non_negative("x", x)?;
    check_positive("d1", d1)?;
    check_positive("d2", d2)?;
    let num = d1 * x;
    let denom = num + d2;
    let p = beta_inc(0.5 * d1, 0.5 * d2, num / denom, d2 / denom, Tolerance::CDF)?;
    let q = beta_inc(0.5 * d2, 0.5 * d1, d2 / denom, num / denom, Tolerance::CDF)?;
    Ok((p, q))
}

pub fn f_pdf(x: f64, d1: f64, d2: f64) -> StatResult<f64> {
    check_non_negative("x", x)?;
    check_positive("d1", d1)?;
    check_positive("d2", d2)?;
    if x == 0.0 {
        return Ok(match d1.partial_cmp(&2.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => 1.0,
            _ => 0.0,
        });
    }
    let ln = 0.5 * d1 * (d1 / d2).ln() + (0.5 * d1 - 1.0) * x.ln()
        - 0.5 * (d1 + d2) * (d1 * x / d2).ln_1p()
        - ln_beta(0.5 * d1, 0.5 * d2);
    Ok(ln.exp())
}

/// Chi-square CDF.
pub fn chi_square_cdf(x: f64, df: f64) -> StatResult<f64> {
    check_non_negative("x", x)?;
    check_positive("df", df)?;
    Ok(gamma_pq(0.5 * df, 0.5 * x, Tolerance::CDF)?.0)
}

/// Chi-square upper tail.
pub fn chi_square_sf(x: f64, df: f64) -> StatResult<f64> {
    check_non_negative("x", x)?;
    check_positive("df", df)?;
    Ok(gamma_pq(0.5 * df, 0.5 * x, Tolerance::CDF)?.1)
}

pub fn chi_square_pdf(x: f64, df: f64) -> StatResult<f64> {
    check_non_negative("x", x)?;
    check_positive("df", df)?;
    if x == 0.0 {
        return Ok(if df < 2.0 {
            f64::INFINITY
        } else if df == 2.0 {
            0.5
        } else {
            0.0
        });
    }
    let k = 0.5 * df;
    let ln = (k - 1.0) * x.ln() - 0.5 * x - k * std::f64::consts::LN_2 - ln_gamma(k);
    Ok(ln.exp())
}
