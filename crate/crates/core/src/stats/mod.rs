//! Goodness-of-fit and two-sample machinery: ECDF, Kolmogorov–Smirnov,
//! Pearson chi-square and binomial intervals.
//!
//! All p-values are asymptotic: the Kolmogorov distribution for KS, the
//! chi-square upper tail for Pearson statistics.

mod binomial;
mod chisq;
mod ks;

pub use binomial::{binomial_ci, binomial_quantile, wilson_interval, z_for_level, Z_95};
pub use chisq::{chi_square_gof, chi_square_homogeneity, ChiSqResult, MIN_EXPECTED};
pub use ks::{kolmogorov_sf, ks_one_sample, ks_two_sample, Ecdf, KsResult};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample is empty")]
    Empty,
    #[error("sample contains NaN")]
    NotANumber,
    #[error("length mismatch: {0} observed bins vs {1} expected")]
    LengthMismatch(usize, usize),
    #[error("expected probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("bin {bin} has expected count {expected:.3} < {MIN_EXPECTED}; merge bins or draw more")]
    ExpectedTooSmall { bin: usize, expected: f64 },
    #[error("{0}")]
    Domain(String),
}
