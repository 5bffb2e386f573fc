use crate::SpineError;
use bbm_engine::critical_c;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Barrier and clock of horizon `t`: `L(s) = c (t − s)^{1/3}` and
/// `τ(s) = ∫_0^s L(r)^{−2} dr = (3/c²)(t^{1/3} − (t − s)^{1/3})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGeometry {
    pub horizon: f64,
    pub c_const: f64,
    cbrt_t: f64,
}

impl TimeGeometry {
    pub fn new(t: f64) -> Result<Self, SpineError> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(SpineError::Domain { what: "horizon", value: t });
        }
        Ok(Self { horizon: t, c_const: critical_c(), cbrt_t: t.cbrt() })
    }

    fn check_time(&self, s: f64) -> Result<(), SpineError> {
        if (0.0..=self.horizon).contains(&s) {
            Ok(())
        } else {
            Err(SpineError::Domain { what: "time", value: s })
        }
    }

    /// `L_t = L(0)`.
    pub fn l0(&self) -> f64 {
        self.c_const * self.cbrt_t
    }

    /// `γ = π²/(2L_t)`.
    pub fn gamma(&self) -> f64 {
        PI * PI / (2.0 * self.l0())
    }

    pub fn l(&self, s: f64) -> Result<f64, SpineError> {
        self.check_time(s)?;
        Ok(self.c_const * (self.horizon - s).cbrt())
    }

    pub fn tau(&self, s: f64) -> Result<f64, SpineError> {
        self.check_time(s)?;
        // t^{1/3} − (t−s)^{1/3} = −t^{1/3}·expm1(ln(1 − s/t)/3), accurate for s ≪ t.
        let gap = -self.cbrt_t * ((-s / self.horizon).ln_1p() / 3.0).exp_m1();
        Ok(3.0 / (self.c_const * self.c_const) * gap)
    }

    /// `τ(t) = 3t^{1/3}/c²`.
    pub fn tau_end(&self) -> f64 {
        3.0 * self.cbrt_t / (self.c_const * self.c_const)
    }

    fn clock_shift(&self, u: f64) -> Result<f64, SpineError> {
        let end = self.tau_end();
        if !(0.0..=end * (1.0 + 1e-12)).contains(&u) {
            return Err(SpineError::Domain { what: "clock value", value: u });
        }
        Ok((self.c_const * self.c_const * u / 3.0).min(self.cbrt_t))
    }

    /// `τ⁻¹(u) = t − (t^{1/3} − c²u/3)³`, expanded so small `u` loses nothing.
    pub fn tau_inv(&self, u: f64) -> Result<f64, SpineError> {
        let w = self.clock_shift(u)?;
        let a = self.cbrt_t;
        Ok((w * (3.0 * a * a - 3.0 * a * w + w * w)).min(self.horizon))
    }

    /// `L(τ⁻¹(u)) = c (t^{1/3} − c²u/3)`.
    pub fn l_at_clock(&self, u: f64) -> Result<f64, SpineError> {
        let w = self.clock_shift(u)?;
        Ok(self.c_const * (self.cbrt_t - w))
    }

    /// `b(r) = L(τ⁻¹(r))/L_t`.
    pub fn spine_scale(&self, r: f64) -> Result<f64, SpineError> {
        Ok(self.l_at_clock(r)? / self.l0())
    }

    /// `d(r) = 1 − b(r)`.
    pub fn spine_offset(&self, r: f64) -> Result<f64, SpineError> {
        let w = self.clock_shift(r)?;
        Ok(w / self.cbrt_t)
    }

    /// Spine horizon `t^b`.
    pub fn spine_end(&self, b_exponent: f64) -> f64 {
        self.horizon.powf(b_exponent).min(self.horizon)
    }

    /// `t^{1/6}` and `t^{5/6}`, the scales of `L_t − 𝔐` and of the argmax.
    pub fn height_scale(&self) -> f64 {
        self.horizon.powf(1.0 / 6.0)
    }

    pub fn time_scale(&self) -> f64 {
        self.horizon.powf(5.0 / 6.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        let g = TimeGeometry::new(1e6).unwrap();
        assert_eq!(g.l(1e6).unwrap(), 0.0);
        assert_eq!(g.tau(0.0).unwrap(), 0.0);
        assert!((g.tau(1e6).unwrap() / g.tau_end() - 1.0).abs() < 1e-14);
        assert!((g.tau_inv(g.tau_end()).unwrap() / 1e6 - 1.0).abs() < 1e-12);
        assert!(g.l(-1.0).is_err() && g.l(2e6).is_err() && g.tau_inv(-0.1).is_err());
        assert!(TimeGeometry::new(0.0).is_err());
    }

    #[test]
    fn clock_is_inverse_of_its_inverse() {
        let g = TimeGeometry::new(1e6).unwrap();
        for i in 0..=200 {
            let u = g.tau_end() * i as f64 / 200.0;
            let back = g.tau(g.tau_inv(u).unwrap()).unwrap();
            assert!((back - u).abs() <= 1e-10 * u.max(1e-300), "u={u}: {back}");
        }
        for u in [1e-12, 1e-8, 1e-4] {
            assert!((g.tau(g.tau_inv(u).unwrap()).unwrap() / u - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn short_time_clock_rate() {
        // τ(s) ~ s/L_t² for s ≪ t.
        let g = TimeGeometry::new(1e6).unwrap();
        let ratio = g.tau(1e3).unwrap() / (1e3 / g.l0().powi(2));
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
        // L_t − L(τ⁻¹(u)) ~ π²u/2 for u ≪ t^{1/3}.
        let drop = (g.l0() - g.l(g.tau_inv(1.0).unwrap()).unwrap()) / (PI * PI / 2.0);
        assert!((drop - 1.0).abs() < 0.01, "{drop}");
    }

    #[test]
    fn scale_identities() {
        for t in [1e4, 1e5, 1e6] {
            let g = TimeGeometry::new(t).unwrap();
            assert!((g.gamma() * g.l0() - PI * PI / 2.0).abs() < 1e-12);
            let lhs = g.gamma().sqrt() / g.l0().powi(2);
            let rhs = (2.0 / (PI * PI)).sqrt() * g.l0().sqrt() / (3.0 * t);
            assert!((lhs / rhs - 1.0).abs() < 1e-12);
            // With c³ = 3π²/2 the spine coefficients are exactly 1 − γr and γr.
            for r in [0.0, 0.3, 2.0, 4.5] {
                assert!((g.spine_scale(r).unwrap() - (1.0 - g.gamma() * r)).abs() < 1e-12);
                assert!((g.spine_offset(r).unwrap() - g.gamma() * r).abs() < 1e-12);
                let direct = g.l(g.tau_inv(r).unwrap()).unwrap();
                assert!((g.l_at_clock(r).unwrap() / direct - 1.0).abs() < 1e-10);
            }
        }
    }
}
