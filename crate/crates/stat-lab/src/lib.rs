//! Empirical-distribution tooling for the Monte Carlo experiments.
//!
//! * [`ReferenceLaw`]: the Rayleigh laws `R`, `R̃`, the uniform law and the
//!   product `U·R`, all with closed-form CDFs.
//! * [`ks_test`] and [`ks_two_sample`]: fixed-threshold Kolmogorov-Smirnov.
//! * [`joint_rur_test`]: checks the `(R, k·U·R)` product structure.
//! * [`survival_exponent_fit`]: weighted regression of `-log p` on `t^(1/3)`.

mod binned;
mod estimate;
mod fit;
mod joint;
mod ks;
mod laws;

pub use binned::{chi_square_gof, ChiSquareReport};
pub use estimate::{MeanEstimate, ProportionEstimate};
pub use fit::{survival_exponent_fit, ExponentFit};
pub use joint::{joint_rur_test, pearson, rank_quadrant_chi2, JointRurReport, JointThresholds};
pub use ks::{ks_critical_99, ks_statistic, ks_test, ks_two_sample, Ecdf, KsReport};
pub use laws::ReferenceLaw;

/// Errors raised by the statistics helpers.
#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatError {
    #[error("empty sample")]
    EmptySample,
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("sample contains a non-finite value")]
    NonFinite,
}
