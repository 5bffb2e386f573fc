use crate::TabooError;
use serde::{Deserialize, Serialize};

/// Time-stepping scheme for the taboo SDE.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TabooScheme {
    /// Euler–Maruyama on the full drift, with boundary refinement and clamp.
    #[default]
    Euler,
    /// Exact Bessel-3 step away from the nearer boundary, plus an Euler step
    /// on the bounded remainder `π cot(πy) − 1/y`. Accurate near the
    /// boundary at any step size; refinement is not used.
    BesselSplit,
}

/// Discretization settings for the taboo walker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabooConfig {
    /// Initial value in `[0, 1]`; boundary starts are moved to the guard.
    pub start: f64,
    /// Base time step Δ.
    pub step: f64,
    pub horizon: f64,
    /// Clamp distance from {0, 1}; each clamp is counted.
    pub boundary_guard: f64,
    /// Half-width ε of the band used for the local time at 1/2.
    pub local_time_band: f64,
    /// When set to κ, steps near the boundary shrink to `(κ·dist)²`, which
    /// leaves the base step untouched while `dist ≥ √Δ/κ`. Without it a
    /// single overshoot lands on the guard, where the drift displacement
    /// `Δ/ε_b` throws the walker to the opposite guard indefinitely.
    #[serde(default = "default_refinement")]
    pub refinement: Option<f64>,
    /// When set, every substep whose endpoints dip below this level draws its
    /// minimum from the law of a Brownian bridge conditioned to avoid 0.
    #[serde(default)]
    pub bridge_low_below: Option<f64>,
    #[serde(default)]
    pub scheme: TabooScheme,
}

/// Default boundary refinement factor κ.
pub const DEFAULT_REFINEMENT: f64 = 0.3;

fn default_refinement() -> Option<f64> {
    Some(DEFAULT_REFINEMENT)
}

impl Default for TabooConfig {
    fn default() -> Self {
        Self {
            start: 0.5,
            step: 1e-4,
            horizon: 1.0,
            boundary_guard: 1e-6,
            local_time_band: 0.01,
            refinement: default_refinement(),
            bridge_low_below: None,
            scheme: TabooScheme::Euler,
        }
    }
}

impl TabooConfig {
    pub fn validate(&self) -> Result<(), TabooError> {
        let bad = |m: &str| Err(TabooError::InvalidConfig(m.to_string()));
        if !(0.0..=1.0).contains(&self.start) {
            return bad("start must lie in [0, 1]");
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return bad("step must be positive");
        }
        if !(self.horizon > 0.0) {
            return bad("horizon must be positive");
        }
        if !(self.boundary_guard > 0.0 && self.boundary_guard < 0.25) {
            return bad("boundary_guard must lie in (0, 0.25)");
        }
        if !(self.local_time_band > 0.0 && self.local_time_band < 0.25) {
            return bad("local_time_band must lie in (0, 0.25)");
        }
        if let Some(k) = self.refinement {
            if !(k > 0.0 && k <= 1.0) {
                return bad("refinement factor must lie in (0, 1]");
            }
        }
        if let Some(l) = self.bridge_low_below {
            if !(l > 0.0 && l <= 1.0) {
                return bad("bridge_low_below must lie in (0, 1]");
            }
        }
        Ok(())
    }

    /// Number of base steps needed to reach the horizon.
    pub fn steps(&self) -> usize {
        (self.horizon / self.step - 1e-9).ceil().max(1.0) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        TabooConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_fields() {
        let cases = [
            TabooConfig { start: 1.2, ..Default::default() },
            TabooConfig { step: 0.0, ..Default::default() },
            TabooConfig { boundary_guard: 0.3, ..Default::default() },
            TabooConfig { local_time_band: 0.0, ..Default::default() },
            TabooConfig { refinement: Some(0.0), ..Default::default() },
        ];
        for c in cases {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn step_count_rounds_up() {
        let c = TabooConfig { step: 0.3, horizon: 1.0, ..Default::default() };
        assert_eq!(c.steps(), 4);
        let c = TabooConfig { step: 1e-4, horizon: 1.0, ..Default::default() };
        assert_eq!(c.steps(), 10_000);
    }
}
