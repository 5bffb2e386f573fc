//! Exact transition law of the taboo process.
//!
//! Killed Brownian motion on (0,1) has eigenfunctions `sin(kπx)` with
//! eigenvalues `k²π²/2`; the h-transform with `h = sin(πx)` gives
//!
//! `q_u(x,y) = e^{π²u/2} (sin πy / sin πx) · 2 Σ_k e^{−k²π²u/2} sin(kπx) sin(kπy)`.
//!
//! The CDF is integrated term by term in closed form, so tabulated nodes
//! carry only the series truncation error.

use crate::TabooError;
use mc_streams::open01;
use rand::Rng;
use std::f64::consts::PI;

/// A truncated series value with a bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// Default series length.
pub const DEFAULT_TERMS: usize = 200;

fn check(x: f64, u: f64) -> Result<(), TabooError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(TabooError::Domain { what: "start point", value: x });
    }
    if !(u > 0.0) || !u.is_finite() {
        return Err(TabooError::Domain { what: "elapsed time", value: u });
    }
    Ok(())
}

/// Bound on `Σ_{k>K} e^{−(k²−1)π²u/2}` by a geometric series.
fn tail(terms: usize, u: f64) -> f64 {
    let a = PI * PI * u / 2.0;
    let k = terms as f64 + 1.0;
    let first = (-(k * k - 1.0) * a).exp();
    let ratio = (-(2.0 * k + 1.0) * a).exp();
    first / (1.0 - ratio)
}

/// Number of terms for which the omitted tail is below `tol`.
pub fn terms_for_tolerance(u: f64, tol: f64) -> usize {
    let a = PI * PI * u / 2.0;
    let mut k = ((1.0 - tol.ln() / a).sqrt()).ceil() as usize;
    k = k.max(1);
    while tail(k, u) > tol {
        k += 1;
    }
    k
}

/// Transition density `q_u(x, y)` truncated to `terms` eigenmodes.
pub fn taboo_transition_density(x: f64, y: f64, u: f64, terms: usize) -> Result<SeriesValue, TabooError> {
    check(x, u)?;
    if !(y > 0.0 && y < 1.0) {
        return Err(TabooError::Domain { what: "end point", value: y });
    }
    if terms == 0 {
        return Err(TabooError::InvalidConfig("at least one series term is required".into()));
    }
    let series = Series::new(x, u, terms);
    let (_, density) = series.eval(y);
    let scale = 2.0 * (PI * y).sin() / (PI * x).sin();
    Ok(SeriesValue { value: density, tail_bound: scale * tail(terms, u) })
}

/// Transition CDF `∫_0^y q_u(x, z) dz` truncated to `terms` eigenmodes.
pub fn taboo_transition_cdf(x: f64, y: f64, u: f64, terms: usize) -> Result<SeriesValue, TabooError> {
    check(x, u)?;
    let series = Series::new(x, u, terms.max(1));
    let (cdf, _) = series.eval(y.clamp(0.0, 1.0));
    Ok(SeriesValue { value: cdf, tail_bound: 2.0 / (PI * x).sin() * tail(terms.max(1), u) })
}

/// Precomputed coefficients `e^{−(k²−1)π²u/2} sin(kπx)` for fixed `(x, u)`.
#[derive(Clone, Debug)]
struct Series {
    coef: Vec<f64>,
    inv_sin_x: f64,
}

impl Series {
    fn new(x: f64, u: f64, terms: usize) -> Self {
        let a = PI * PI * u / 2.0;
        let coef = (1..=terms)
            .map(|k| {
                let k = k as f64;
                (-(k * k - 1.0) * a).exp() * (k * PI * x).sin()
            })
            .collect();
        Self { coef, inv_sin_x: 1.0 / (PI * x).sin() }
    }

    /// Returns `(cdf(y), density(y))`.
    fn eval(&self, y: f64) -> (f64, f64) {
        let th = PI * y;
        let (s1, c1) = th.sin_cos();
        let two_c = 2.0 * c1;
        // sin(jπy) for j = k-1, k, k+1, advanced by the Chebyshev recurrence.
        let (mut s_prev, mut s_cur, mut s_next) = (0.0, s1, 2.0 * s1 * c1);
        let mut cdf = 0.0;
        let mut dens = 0.0;
        for (i, &c) in self.coef.iter().enumerate() {
            let k = (i + 1) as f64;
            dens += c * s_cur;
            let integral = if i == 0 {
                0.5 * (y - s_next / (2.0 * PI))
            } else {
                0.5 * (s_prev / ((k - 1.0) * PI) - s_next / ((k + 1.0) * PI))
            };
            cdf += c * integral;
            let s_new = two_c * s_next - s_cur;
            s_prev = s_cur;
            s_cur = s_next;
            s_next = s_new;
        }
        let scale = 2.0 * self.inv_sin_x;
        (scale * cdf, scale * s1 * dens)
    }
}

/// Inverse-CDF sampler for the transition law from a fixed `(x, u)`.
#[derive(Clone, Debug)]
pub struct TransitionSampler {
    series: Series,
    nodes: Vec<f64>,
    cdf: Vec<f64>,
}

const NODES: usize = 4096;

impl TransitionSampler {
    pub fn new(x: f64, u: f64) -> Result<Self, TabooError> {
        check(x, u)?;
        let terms = terms_for_tolerance(u, 1e-17);
        let series = Series::new(x, u, terms);
        let nodes: Vec<f64> = (0..=NODES).map(|i| i as f64 / NODES as f64).collect();
        let mut cdf: Vec<f64> = nodes.iter().map(|&y| series.eval(y).0).collect();
        cdf[0] = 0.0;
        cdf[NODES] = 1.0;
        let mut run = 0.0f64;
        for c in cdf.iter_mut() {
            run = run.max(*c).min(1.0);
            *c = run;
        }
        Ok(Self { series, nodes, cdf })
    }

    pub fn terms(&self) -> usize {
        self.series.coef.len()
    }

    pub fn cdf(&self, y: f64) -> f64 {
        self.series.eval(y.clamp(0.0, 1.0)).0
    }

    pub fn density(&self, y: f64) -> f64 {
        self.series.eval(y.clamp(0.0, 1.0)).1
    }

    /// Generalized inverse of the CDF: table bracket, then safeguarded Newton.
    pub fn quantile(&self, p: f64) -> f64 {
        let j = self.cdf.partition_point(|&c| c < p).clamp(1, NODES);
        let (mut lo, mut hi) = (self.nodes[j - 1], self.nodes[j]);
        let (clo, chi) = (self.cdf[j - 1], self.cdf[j]);
        let mut y = if chi > clo { lo + (hi - lo) * (p - clo) / (chi - clo) } else { 0.5 * (lo + hi) };
        for _ in 0..60 {
            let (c, d) = self.series.eval(y);
            let err = c - p;
            if err.abs() < 1e-14 {
                break;
            }
            if err > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let newton = y - err / d;
            y = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 {
                break;
            }
        }
        y.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(open01(rng))
    }
}

/// One exact draw from `q_u(x, ·)`. Build a [`TransitionSampler`] for repeated
/// draws from the same `(x, u)`.
pub fn sample_taboo_exact<R: Rng + ?Sized>(x: f64, u: f64, rng: &mut R) -> Result<f64, TabooError> {
    Ok(TransitionSampler::new(x, u)?.sample(rng))
}

/// Killed-Brownian-motion density by the method of images, used to cross-check
/// the eigenfunction series (it converges fastest where the series is slowest).
pub fn taboo_density_by_images(x: f64, y: f64, u: f64) -> f64 {
    let phi = |z: f64| (-z * z / (2.0 * u)).exp() / (2.0 * PI * u).sqrt();
    let mut killed = 0.0;
    for n in -30i32..=30 {
        let shift = 2.0 * n as f64;
        killed += phi(y - x + shift) - phi(y + x + shift);
    }
    (PI * PI * u / 2.0).exp() * (PI * y).sin() / (PI * x).sin() * killed
}

#[cfg(test)]
mod tests {
    use super::*;
    use mc_streams::RandomSource;

    fn stationary(y: f64) -> f64 {
        2.0 * (PI * y).sin().powi(2)
    }

    #[test]
    fn integrates_to_one() {
        // Composite Simpson on a fine grid.
        let (x, u) = (0.3, 0.5);
        let n = 4000;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for i in 1..n {
            let y = i as f64 * h;
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * taboo_transition_density(x, y, u, DEFAULT_TERMS).unwrap().value;
        }
        assert!((acc * h / 3.0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn long_times_relax_to_stationary_density() {
        for &x in &[0.01, 0.3, 0.5, 0.97] {
            for i in 1..50 {
                let y = i as f64 / 50.0;
                let q = taboo_transition_density(x, y, 50.0, DEFAULT_TERMS).unwrap().value;
                assert!((q - stationary(y)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn reversible_with_respect_to_speed_measure() {
        let (x, y, u) = (0.2, 0.7, 0.3);
        let lhs = taboo_transition_density(x, y, u, DEFAULT_TERMS).unwrap().value * stationary(x);
        let rhs = taboo_transition_density(y, x, u, DEFAULT_TERMS).unwrap().value * stationary(y);
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn series_agrees_with_images() {
        for &(x, y, u) in &[(0.3, 0.4, 0.01), (0.5, 0.52, 1e-3), (0.1, 0.6, 0.2), (0.8, 0.3, 1.0)] {
            let terms = terms_for_tolerance(u, 1e-17);
            let s = taboo_transition_density(x, y, u, terms).unwrap().value;
            let m = taboo_density_by_images(x, y, u);
            assert!((s - m).abs() < 1e-9 * m.max(1.0), "{x} {y} {u}: {s} vs {m}");
        }
    }

    #[test]
    fn tail_bound_is_small_for_moderate_times() {
        let v = taboo_transition_density(0.4, 0.6, 0.05, DEFAULT_TERMS).unwrap();
        assert!(v.tail_bound < 1e-12);
    }

    #[test]
    fn cdf_matches_quadrature_of_density() {
        let (x, u) = (0.3, 0.1);
        let sampler = TransitionSampler::new(x, u).unwrap();
        let n = 2000;
        let h = 0.6 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            acc += sampler.density((i as f64 + 0.5) * h) * h;
        }
        assert!((acc - sampler.cdf(0.6)).abs() < 1e-6);
        assert!((sampler.cdf(1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &(x, u) in &[(0.5, 1e-4), (0.3, 0.1), (0.05, 0.02), (0.9, 3.0)] {
            let s = TransitionSampler::new(x, u).unwrap();
            for i in 1..200 {
                let p = i as f64 / 200.0;
                assert!((s.cdf(s.quantile(p)) - p).abs() < 1e-10, "x={x} u={u} p={p}");
            }
        }
    }

    #[test]
    fn errors_on_bad_domain() {
        assert!(taboo_transition_density(0.3, 0.4, 0.0, 10).is_err());
        assert!(taboo_transition_density(0.0, 0.4, 1.0, 10).is_err());
        let mut rng = RandomSource::from_seed(1);
        assert!(sample_taboo_exact(0.5, -1.0, &mut rng).is_err());
    }
}
