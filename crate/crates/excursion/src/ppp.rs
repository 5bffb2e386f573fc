use crate::ExcursionError;
use mc_streams::open01;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point `(u, a)`: local-time coordinate and excursion depth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PppPoint {
    pub u: f64,
    pub a: f64,
}

/// Minimum, its location, and the runner-up minimum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinResult {
    pub min_value: f64,
    pub argmin: f64,
    /// `+∞` when there is no second candidate.
    pub second_min: f64,
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
}

/// Homogeneous Poisson process of intensity `rate` on the quadrant
/// `{(v, a) : v, a ≥ 0}`, scored by `a + v/2`.
///
/// The region `{a + v/2 ≤ T}` is a triangle of area `T²`, so scores form a
/// Poisson process with mean measure `rate·T²`. Nested triangles are added
/// layer by layer until two points are present; the minimum and runner-up
/// are then exact. Returns `(M₀, v₀*, M₀*)`.
pub fn sample_triangle_model<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> MinResult {
    assert!(rate > 0.0, "intensity must be positive");
    let step = 1.0 / rate.sqrt();
    let mut scores: Vec<(f64, f64)> = Vec::new();
    let mut inner = 0.0f64;
    loop {
        let outer = inner + step;
        let (lo2, hi2) = (inner * inner, outer * outer);
        for _ in 0..poisson(rate * (hi2 - lo2), rng) {
            // Uniform point of the layer: score has density ∝ s, position
            // along the diagonal a + v/2 = s is uniform in v ∈ [0, 2s].
            let s = (lo2 + open01(rng) * (hi2 - lo2)).sqrt();
            let v = 2.0 * s * open01(rng);
            scores.push((s, v));
        }
        if scores.len() >= 2 {
            break;
        }
        inner = outer;
    }
    scores.sort_by(|x, y| x.0.total_cmp(&y.0));
    MinResult { min_value: scores[0].0, argmin: scores[0].1, second_min: scores[1].0 }
}

/// Minimum of `a + γu/2` over points with `u` in `[lo, hi]`; ties go to the
/// smaller `u`.
pub fn ppp_min(gamma: f64, points: &[PppPoint], window: (f64, f64)) -> Result<MinResult, ExcursionError> {
    if !(gamma > 0.0) {
        return Err(ExcursionError::Domain { what: "gamma", value: gamma });
    }
    let (lo, hi) = window;
    let mut best: Option<(f64, f64)> = None;
    let mut second = f64::INFINITY;
    for p in points.iter().filter(|p| p.u >= lo && p.u <= hi) {
        let score = p.a + gamma * p.u / 2.0;
        match best {
            Some((b, bu)) if score > b || (score == b && p.u >= bu) => second = second.min(score),
            Some((b, _)) => {
                second = second.min(b);
                best = Some((score, p.u));
            }
            None => best = Some((score, p.u)),
        }
    }
    let (min_value, argmin) = best.ok_or(ExcursionError::EmptyWindow { lo, hi })?;
    Ok(MinResult { min_value, argmin, second_min: second })
}

/// Total mass of `{(u, a) : a + γu/2 ≤ B}` under `du ⊗ ν(da)`: `−ln cos(πB)/γ`.
fn score_mass(gamma: f64, b: f64) -> f64 {
    -(PI * b).cos().ln() / gamma
}

/// A point of the excursion process with score `a + γu/2 ≤ b`.
fn point_below<R: Rng + ?Sized>(gamma: f64, b: f64, rng: &mut R) -> PppPoint {
    let tan_b = (PI * b).tan();
    loop {
        // Depth from ν restricted to (0, b), accepted with weight (b − a)/b,
        // the relative length of the admissible u-interval.
        let a = (open01(rng) * tan_b).atan() / PI;
        if open01(rng) * b < b - a {
            let u = open01(rng) * 2.0 * (b - a) / gamma;
            return PppPoint { u, a };
        }
    }
}

/// Exact sample of the excursion point process, restricted to scores
/// `a + γu/2` small enough that the two lowest points overall, and the two
/// lowest with `u` in `window`, are all included.
pub fn sample_excursion_ppp<R: Rng + ?Sized>(gamma: f64, window: (f64, f64), rng: &mut R) -> Vec<PppPoint> {
    assert!(gamma > 0.0, "gamma must be positive");
    let mut points = Vec::new();
    let mut inner = 0.0f64;
    let mut outer = gamma.sqrt().min(0.1);
    loop {
        let extra = poisson(score_mass(gamma, outer) - score_mass(gamma, inner), rng);
        let mut added = 0;
        while added < extra {
            let p = point_below(gamma, outer, rng);
            if p.a + gamma * p.u / 2.0 > inner {
                points.push(p);
                added += 1;
            }
        }
        let in_window = points.iter().filter(|p| p.u >= window.0 && p.u <= window.1).count();
        if (points.len() >= 2 && in_window >= 2) || outer >= 0.49 {
            return points;
        }
        inner = outer;
        outer = (2.0 * outer).min(0.5 * (outer + 0.5)).min(0.49);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mc_streams::RandomSource;

    #[test]
    fn two_point_hand_computation() {
        let pts = [PppPoint { u: 1.0, a: 0.3 }, PppPoint { u: 4.0, a: 0.1 }];
        let r = ppp_min(0.1, &pts, (0.0, f64::INFINITY)).unwrap();
        assert!((r.min_value - 0.3).abs() < 1e-15);
        assert_eq!(r.argmin, 4.0);
        assert!((r.second_min - 0.35).abs() < 1e-15);
    }

    #[test]
    fn ties_go_to_smaller_u() {
        let pts = [PppPoint { u: 2.0, a: 0.1 }, PppPoint { u: 0.0, a: 0.2 }];
        let r = ppp_min(0.1, &pts, (0.0, 10.0)).unwrap();
        assert_eq!(r.argmin, 0.0);
        assert_eq!(r.second_min, r.min_value);
    }

    #[test]
    fn empty_window_is_an_error() {
        let pts = [PppPoint { u: 1.0, a: 0.3 }];
        assert_eq!(ppp_min(0.1, &pts, (2.0, 3.0)), Err(ExcursionError::EmptyWindow { lo: 2.0, hi: 3.0 }));
        assert!(ppp_min(0.1, &[], (0.0, 1.0)).is_err());
    }

    #[test]
    fn single_point_has_infinite_runner_up() {
        let r = ppp_min(1.0, &[PppPoint { u: 0.5, a: 0.2 }], (0.0, 1.0)).unwrap();
        assert_eq!(r.second_min, f64::INFINITY);
    }

    #[test]
    fn triangle_runner_up_is_strictly_larger() {
        let mut rng = RandomSource::from_seed(5);
        for _ in 0..10_000 {
            let r = sample_triangle_model(PI * PI / 2.0, &mut rng);
            assert!(r.second_min > r.min_value);
            assert!(r.argmin >= 0.0 && r.argmin <= 2.0 * r.min_value);
        }
    }

    #[test]
    fn score_mass_matches_quadrature() {
        let (gamma, b) = (0.01, 0.2);
        // ∫_0^b ν((0,a)) (2/γ) da with the midpoint rule.
        let n = 100_000;
        let h = b / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let a = (i as f64 + 0.5) * h;
            acc += crate::excursion_rate_below(a).unwrap() * 2.0 / gamma * h;
        }
        assert!((acc / score_mass(gamma, b) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sampled_points_respect_layers() {
        let mut rng = RandomSource::from_seed(6);
        let pts = sample_excursion_ppp(1e-3, (0.0, f64::INFINITY), &mut rng);
        assert!(pts.len() >= 2);
        assert!(pts.iter().all(|p| p.a > 0.0 && p.a < 0.5 && p.u >= 0.0));
    }
}
