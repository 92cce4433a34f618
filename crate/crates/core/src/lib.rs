//! Hypothesis-test selection and execution for one-factor experiments.
//!
//! The crate walks a fixed decision tree: per-group normality (Shapiro-Wilk
//! below a size threshold, Kolmogorov-Smirnov above), Levene's test for
//! homogeneity of variance, then a parametric or rank-based comparison
//! chosen by the number of treatments, followed by a post-hoc procedure when
//! the omnibus test rejects. Every distribution function is implemented in
//! [`special`]; nothing delegates to an external statistics library.

pub mod dataset;
pub mod descriptive;
pub mod engine;
mod error;
pub mod homogeneity;
pub mod location;
pub mod montecarlo;
pub mod normality;
mod result;
pub mod special;

pub use error::{DatasetError, StatError, StatResult};
pub use result::{Df, TestResult};

/// Default significance level.
pub const DEFAULT_ALPHA: f64 = 0.05;
