use super::check_finite;
use crate::{StatError, StatResult};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_32: f64 = 5.656_854_249_492_381;

// Cody (1969) rational Chebyshev coefficients.
const A: [f64; 5] = [
    2.235_252_035_460_683_9,
    161.028_231_068_555_88,
    1_067.689_485_460_370_9,
    18_154.981_253_343_561,
    0.065_682_337_918_207_45,
];
const B: [f64; 4] = [
    47.202_581_904_688_24,
    976.098_551_737_776_7,
    10_260.932_208_618_978,
    45_507.789_335_026_73,
];
const C: [f64; 9] = [
    0.398_941_512_088_134_66,
    8.883_149_794_388_376,
    93.506_656_132_177_86,
    597.270_276_394_800_3,
    2_494.537_585_290_372_7,
    6_848.190_450_536_283,
    11_602.651_437_647_35,
    9_842.714_838_383_978,
    1.076_557_677_372_019_2e-8,
];
const D: [f64; 8] = [
    22.266_688_044_328_117,
    235.387_901_782_625,
    1_519.377_599_407_554_8,
    6_485.558_298_266_761,
    18_615.571_640_885_097,
    34_900.952_721_145_98,
    38_912.003_286_093_27,
    19_685.429_676_859_99,
];
const P: [f64; 6] = [
    0.215_898_534_057_957,
    0.127_401_161_160_247_36,
    0.022_235_277_870_649_807,
    0.001_421_619_193_227_893_5,
    2.911_287_495_116_879_2e-5,
    0.023_073_441_764_940_174,
];
const Q: [f64; 5] = [
    1.284_260_096_144_911_2,
    0.468_238_212_480_865_1,
    0.065_988_137_868_928_55,
    0.003_782_396_332_027_582_4,
    7.297_515_550_839_662e-5,
];

/// Returns `(Φ(x), 1 - Φ(x))`, each accurate in relative terms.
fn both_tails(x: f64) -> (f64, f64) {
    let y = x.abs();
    if y <= 0.674_489_75 {
        let (mut num, mut den) = (0.0, 0.0);
        if y > f64::EPSILON * 0.5 {
            let xsq = x * x;
            num = A[4] * xsq;
            den = xsq;
            for i in 0..3 {
                num = (num + A[i]) * xsq;
                den = (den + B[i]) * xsq;
            }
        }
        let t = x * (num + A[3]) / (den + B[3]);
        return (0.5 + t, 0.5 - t);
    }
    let small_tail = if y <= SQRT_32 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        let r = (num + C[7]) / (den + D[7]);
        gaussian_tail(y) * r
    } else {
        let xsq = 1.0 / (x * x);
        let mut num = P[5] * xsq;
        let mut den = xsq;
        for i in 0..4 {
            num = (num + P[i]) * xsq;
            den = (den + Q[i]) * xsq;
        }
        let r = xsq * (num + P[4]) / (den + Q[4]);
        gaussian_tail(y) * (FRAC_1_SQRT_2PI - r) / y
    };
    if x > 0.0 {
        (1.0 - small_tail, small_tail)
    } else {
        (small_tail, 1.0 - small_tail)
    }
}

/// `exp(-y²/2)` split so the square does not lose low-order bits.
fn gaussian_tail(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq * 0.5).exp() * (-del * 0.5).exp()
}

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal CDF `Φ(z)`.
pub fn std_normal_cdf(z: f64) -> StatResult<f64> {
    check_finite("z", z)?;
    Ok(both_tails(z).0)
}

/// Upper tail `1 - Φ(z)` without cancellation.
pub fn std_normal_sf(z: f64) -> StatResult<f64> {
    check_finite("z", z)?;
    Ok(both_tails(z).1)
}

pub(crate) fn phi(z: f64) -> f64 {
    both_tails(z).0
}

pub(crate) fn phi_c(z: f64) -> f64 {
    both_tails(z).1
}

/// Inverse of the standard normal CDF.
///
/// Safeguarded Newton iteration on `ln Φ(x) = ln p` inside the bracket
/// `[-40, 0]` (lower half; the upper half is solved by symmetry on `1 - p`,
/// which is exact for `p >= 0.5`). A step that leaves the bracket is replaced
/// by bisection.
pub fn std_normal_quantile(p: f64) -> StatResult<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(StatError::Domain(format!("p must lie in (0, 1), got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p < 0.5 {
        Ok(lower_quantile(p))
    } else {
        Ok(-lower_quantile(1.0 - p))
    }
}

fn lower_quantile(p: f64) -> f64 {
    let target = p.ln();
    // Abramowitz & Stegun 26.2.23 starting point, |error| < 4.5e-4.
    let t = (-2.0 * target).sqrt();
    let mut x = -(t - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
        / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t));
    let (mut lo, mut hi) = (-40.0_f64, 0.0_f64);
    for _ in 0..200 {
        let cdf = phi(x);
        let g = cdf.ln() - target;
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        // d/dx ln Φ(x) = φ(x) / Φ(x)
        let slope = std_normal_pdf(x) / cdf;
        let mut next = x - g / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}
