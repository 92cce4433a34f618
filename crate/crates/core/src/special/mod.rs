//! Distribution functions used by every test in the crate.
//!
//! Kernels: regularized incomplete beta (Lentz continued fraction with the
//! usual symmetry switch) and regularized incomplete gamma (series below
//! `x = s + 1`, continued fraction above). Student-t, F and chi-square CDFs
//! are thin wrappers over these. The normal CDF uses Cody's rational
//! approximations; the studentized range is computed by nested quadrature.

mod dist;
mod gamma;
pub(crate) mod normal;
mod quadrature;
mod studentized_range;

pub use dist::{
    chi_square_cdf, chi_square_pdf, chi_square_sf, f_cdf, f_pdf, f_sf, student_t_cdf,
    student_t_pdf, student_t_two_sided_p,
};
pub use gamma::{
    ln_beta, ln_gamma, regularized_incomplete_beta, regularized_lower_gamma,
    regularized_upper_gamma,
};
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf};
pub use quadrature::{gauss_legendre, integrate_adaptive};
pub use studentized_range::{studentized_range_cdf, studentized_range_sf};

/// Convergence controls for iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Largest acceptable absolute error when an iteration stops early.
    pub abs_eps: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub const CDF: Tolerance = Tolerance {
        abs_eps: 1e-10,
        max_iter: 100_000,
    };
    pub const STUDENTIZED_RANGE: Tolerance = Tolerance {
        abs_eps: 1e-8,
        max_iter: 60,
    };

    pub fn new(abs_eps: f64, max_iter: usize) -> crate::StatResult<Self> {
        if !(abs_eps > 0.0) || max_iter < 1 {
            return Err(crate::StatError::InvalidParameter(format!(
                "tolerance needs abs_eps > 0 and max_iter >= 1 (got {abs_eps}, {max_iter})"
            )));
        }
        Ok(Self { abs_eps, max_iter })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::CDF
    }
}

pub(crate) fn check_finite(name: &str, x: f64) -> crate::StatResult<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(crate::StatError::Domain(format!("{name} must be finite, got {x}")))
    }
}

pub(crate) fn check_positive(name: &str, x: f64) -> crate::StatResult<()> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(crate::StatError::Domain(format!("{name} must be positive, got {x}")))
    }
}
