use crate::BbmError;
use std::f64::consts::PI;

/// `c = (3π²/2)^{1/3}`.
pub fn critical_c() -> f64 {
    (1.5 * PI * PI).cbrt()
}

/// Moving barrier `L_t(s) = c (t − s)^{1/3}`.
#[inline]
pub fn barrier(t: f64, s: f64) -> f64 {
    critical_c() * (t - s).max(0.0).cbrt()
}

/// One particle's contribution `L sin(πx/L) e^{x−L}` on `[0, L]`, else 0.
#[inline]
pub fn z_term(x: f64, s: f64, t: f64) -> f64 {
    let l = barrier(t, s);
    if (0.0..=l).contains(&x) && l > 0.0 {
        l * (PI * x / l).sin() * (x - l).exp()
    } else {
        0.0
    }
}

/// `V = Σ x e^x`.
pub fn v_functional(positions: &[f64]) -> f64 {
    positions.iter().map(|&x| x * x.exp()).sum()
}

/// `(Z, Z′)` at time `s` for horizon `t`. `stayed_inside[i]` says whether the
/// ancestral path of particle `i` never left `[0, L_t(r)]`.
pub fn z_functional(positions: &[f64], stayed_inside: &[bool], s: f64, t: f64) -> Result<(f64, f64), BbmError> {
    if !(s < t) || s < 0.0 {
        return Err(BbmError::Domain { what: "time s (must satisfy 0 ≤ s < t)", value: s });
    }
    if positions.len() != stayed_inside.len() {
        return Err(BbmError::InvalidConfig("positions and flags differ in length".into()));
    }
    let mut z = 0.0;
    let mut zp = 0.0;
    for (&x, &ok) in positions.iter().zip(stayed_inside) {
        let term = z_term(x, s, t);
        z += term;
        if ok {
            zp += term;
        }
    }
    Ok((z, zp))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_value() {
        assert!((critical_c() - 2.455_445_7).abs() < 1e-7);
    }

    #[test]
    fn v_examples() {
        assert_eq!(v_functional(&[]), 0.0);
        assert!((v_functional(&[1.0]) - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn z_boundary_and_midpoint() {
        let (s, t) = (3.0, 30.0);
        let l = barrier(t, s);
        assert!(z_term(l, s, t).abs() < 1e-12 * l);
        let mid = z_term(l / 2.0, s, t);
        assert!((mid - l * (-l / 2.0).exp()).abs() < 1e-14);
        assert_eq!(z_term(l + 0.1, s, t), 0.0);
        assert_eq!(z_term(-0.1, s, t), 0.0);
    }

    #[test]
    fn z_prime_counts_flagged_particles_only() {
        let (z, zp) = z_functional(&[1.0, 2.0], &[true, false], 0.0, 10.0).unwrap();
        assert!(zp <= z && zp > 0.0);
        assert!((zp - z_term(1.0, 0.0, 10.0)).abs() < 1e-15);
        assert!(z_functional(&[1.0], &[true], 10.0, 10.0).is_err());
    }
}
