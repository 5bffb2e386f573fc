//! The Brownian taboo process: Brownian motion on `(0,1)` conditioned never
//! to leave, i.e. the Doob transform with `h(x) = sin(πx)`. It solves
//! `dK = π cot(πK) ds + dB` and has stationary density `2 sin²(πy)`.
//!
//! * [`TabooWalker`] advances the Euler–Maruyama scheme and accumulates the
//!   band estimate of the local time at 1/2.
//! * [`TabooPath`] records a trajectory and its excursions below 1/2.
//! * [`spectral`] evaluates the exact transition density by its eigenfunction
//!   series and samples from it.

mod config;
mod excursions;
mod occupation;
mod path;
pub mod spectral;
mod walker;

pub use config::{TabooConfig, TabooScheme, DEFAULT_REFINEMENT};
pub use excursions::{decompose_excursions, ExcursionRecord, ExcursionTracker};
pub use occupation::{stationary_cdf, Occupation};
pub use path::{step_taboo, TabooPath};
pub use spectral::{sample_taboo_exact, taboo_transition_density, SeriesValue, TransitionSampler};
pub use walker::{Substep, TabooWalker};

use std::f64::consts::PI;

/// Errors raised by the taboo-process routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TabooError {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Drift of the taboo process, `π cot(πx)`.
pub fn taboo_drift(x: f64) -> Result<f64, TabooError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(TabooError::Domain { what: "taboo position", value: x });
    }
    Ok(drift_unchecked(x))
}

#[inline]
pub(crate) fn drift_unchecked(x: f64) -> f64 {
    PI / (PI * x).tan()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drift_values() {
        assert!(taboo_drift(0.5).unwrap().abs() < 1e-15);
        assert!((taboo_drift(0.25).unwrap() - PI).abs() < 1e-14);
        for &x in &[1e-3, 1e-5, 1e-7] {
            assert!((taboo_drift(x).unwrap() * x - 1.0).abs() < 4.0 * x);
        }
    }

    #[test]
    fn drift_is_antisymmetric() {
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert!((taboo_drift(x).unwrap() + taboo_drift(1.0 - x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn drift_rejects_boundary() {
        for x in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(taboo_drift(x).is_err());
        }
    }
}
