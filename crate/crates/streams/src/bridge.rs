//! Brownian-bridge extremes, hitting probabilities and interior points.
//!
//! All functions take the variance accumulated over the step, `var = σ²·h`.
//! A constant drift does not change the law of the bridge, so these apply to
//! drifted Brownian motion with known endpoints as well.

/// Minimum of a Brownian bridge from `a` to `b`, given a uniform `u ∈ (0,1)`.
#[inline]
pub fn bridge_min(a: f64, b: f64, var: f64, u: f64) -> f64 {
    let d = a - b;
    0.5 * (a + b - (d * d - 2.0 * var * u.ln()).sqrt())
}

/// Minimum of a Brownian bridge from `a` to `b` conditioned to stay above
/// `floor`, given a uniform `u ∈ (0,1)`.
///
/// Doob transforms leave bridges unchanged, so this is also the minimum of a
/// bridge of Brownian motion conditioned to avoid `floor` (locally, a Bessel-3
/// bridge).
#[inline]
pub fn bridge_min_above(a: f64, b: f64, var: f64, floor: f64, u: f64) -> f64 {
    let q = (-2.0 * (a - floor) * (b - floor) / var).exp();
    let d = a - b;
    let low = 0.5 * (a + b - (d * d - 2.0 * var * (q + u * (1.0 - q)).ln()).sqrt());
    low.max(floor)
}

/// Maximum of a Brownian bridge from `a` to `b`, given a uniform `u ∈ (0,1)`.
#[inline]
pub fn bridge_max(a: f64, b: f64, var: f64, u: f64) -> f64 {
    let d = a - b;
    0.5 * (a + b + (d * d - 2.0 * var * u.ln()).sqrt())
}

/// Probability that a bridge between `a` and `b`, both on the same side of
/// `level`, touches `level`.
#[inline]
pub fn bridge_hit_probability(a: f64, b: f64, var: f64, level: f64) -> f64 {
    let (da, db) = (a - level, b - level);
    if da * db <= 0.0 {
        return 1.0;
    }
    (-2.0 * da * db / var).exp()
}

/// Value at fraction `f ∈ [0,1]` of the step of a bridge from `a` to `b`,
/// given a standard normal `z`.
#[inline]
pub fn bridge_point(a: f64, b: f64, var: f64, f: f64, z: f64) -> f64 {
    a + (b - a) * f + (var * f * (1.0 - f)).sqrt() * z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RandomSource;

    #[test]
    fn extremes_bracket_endpoints() {
        for &u in &[1e-12, 0.3, 0.999_999] {
            assert!(bridge_min(0.2, 0.5, 0.01, u) <= 0.2);
            assert!(bridge_max(0.2, 0.5, 0.01, u) >= 0.5);
        }
    }

    #[test]
    fn min_law_matches_hitting_probability() {
        // P(min ≤ m) = exp(-2(a-m)(b-m)/var).
        let (a, b, var) = (0.3, 0.1, 0.05);
        let m = 0.0;
        let mut rng = RandomSource::from_seed(9);
        let n = 400_000;
        let hits = (0..n).filter(|_| bridge_min(a, b, var, rng.open01()) <= m).count();
        let p = bridge_hit_probability(a, b, var, m);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p).abs() < 4.0 * se);
    }

    #[test]
    fn discretized_walk_agrees_with_exact_min_law() {
        // Fine random-walk bridges approach the exact minimum law from above.
        let (a, b, var) = (0.0, 0.0, 1.0);
        let mut rng = RandomSource::from_seed(4);
        let (n, steps) = (20_000, 2_000);
        let mut below = 0;
        for _ in 0..n {
            let mut w = 0.0;
            let mut path = Vec::with_capacity(steps + 1);
            path.push(0.0);
            for _ in 0..steps {
                w += rng.normal() / (steps as f64).sqrt();
                path.push(w);
            }
            let end = w;
            let min =
                path.iter().enumerate().map(|(i, x)| x - end * i as f64 / steps as f64).fold(f64::INFINITY, f64::min);
            if min <= -0.5 {
                below += 1;
            }
        }
        let exact = bridge_hit_probability(a, b, var, -0.5);
        let p = below as f64 / n as f64;
        assert!(p <= exact + 0.01 && p > exact - 0.06, "p={p}, exact={exact}");
    }

    #[test]
    fn conditioned_minimum_matches_its_law() {
        // P(min < m | min > 0) = (e^{-2(a-m)(b-m)/v} - e^{-2ab/v}) / (1 - e^{-2ab/v}).
        let (a, b, var, m) = (0.1, 0.15, 0.02, 0.04);
        let mut rng = RandomSource::from_seed(17);
        let n = 200_000;
        let hits = (0..n).filter(|_| bridge_min_above(a, b, var, 0.0, rng.open01()) < m).count();
        let q = bridge_hit_probability(a, b, var, 0.0);
        let p = (bridge_hit_probability(a, b, var, m) - q) / (1.0 - q);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p).abs() < 4.0 * se);
        for u in [1e-12, 0.3, 0.999] {
            let low = bridge_min_above(a, b, var, 0.0, u);
            assert!(low >= 0.0 && low <= a.min(b));
        }
    }

    #[test]
    fn bridge_point_moments() {
        let mut rng = RandomSource::from_seed(8);
        let n = 200_000;
        let (mut m1, mut m2) = (0.0, 0.0);
        for _ in 0..n {
            let v = bridge_point(1.0, 3.0, 2.0, 0.25, rng.normal());
            m1 += v;
            m2 += v * v;
        }
        let mean = m1 / n as f64;
        let var = m2 / n as f64 - mean * mean;
        assert!((mean - 1.5).abs() < 0.01);
        assert!((var - 2.0 * 0.25 * 0.75).abs() < 0.01);
    }
}
