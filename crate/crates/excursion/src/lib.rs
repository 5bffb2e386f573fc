//! Excursions of the taboo process below 1/2 and the minima they induce.
//!
//! Excursion depths per unit local time form a Poisson point process with
//! intensity `du ⊗ ν(da)`, `ν((0,d)) = (π/2) tan(πd)`. Adding a linear drift
//! `γu/2` and taking the minimum gives Rayleigh limits; this crate provides
//! the closed forms, exact samplers for the point processes, and the minimum
//! of `b(s)K_s + d(s)` along simulated taboo paths.

mod drifted;
mod measure;
mod ppp;

pub use drifted::{
    drifted_taboo_min, excursion_ppp_min_from_taboo, ratio_bound_check, simulate_drifted_min, DriftedMinOutcome,
    DriftedMinProblem, DriftedMinTracker, ProblemDiagnostics,
};
pub use measure::{excursion_density, excursion_rate_below};
pub use ppp::{ppp_min, sample_excursion_ppp, sample_triangle_model, MinResult, PppPoint};

/// Errors raised by this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExcursionError {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("no point inside the window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("path ends at {have}, before the horizon {need}")]
    PathTooShort { have: f64, need: f64 },
    #[error(transparent)]
    Taboo(#[from] taboo_diffusion::TabooError),
}
