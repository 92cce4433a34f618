use crate::{StatError, StatResult};
use std::sync::OnceLock;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.reverse();
    out
}

pub(crate) fn gl20() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(20))
}

pub(crate) fn fixed_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gl20().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Adaptive bisection on 20-point Gauss-Legendre panels.
///
/// A panel is accepted when its estimate agrees with the sum over its two
/// halves to within the share of `abs_eps` proportional to its width.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_eps: f64,
    max_depth: usize,
) -> StatResult<f64> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(StatError::Domain(format!("bad integration interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    const START_PANELS: usize = 8;
    let total_width = b - a;
    let step = total_width / START_PANELS as f64;
    let mut stack = Vec::new();
    for i in 0..START_PANELS {
        let lo = a + i as f64 * step;
        let hi = if i + 1 == START_PANELS { b } else { lo + step };
        stack.push((lo, hi, fixed_panel(&mut f, lo, hi), 0usize));
    }
    let mut sum = 0.0;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = fixed_panel(&mut f, lo, mid);
        let right = fixed_panel(&mut f, mid, hi);
        let refined = left + right;
        let budget = abs_eps * (hi - lo) / total_width;
        if (refined - est).abs() <= budget.max(f64::EPSILON * refined.abs()) {
            sum += refined;
        } else if depth >= max_depth {
            return Err(StatError::NoConvergence("adaptive quadrature"));
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(sum)
}
