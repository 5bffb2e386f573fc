//! Law of the all-time maximum of a BBM started far from the absorbing
//! barrier.
//!
//! `u(y) = P_y(some particle reaches H)` solves
//! `½u'' − u' + β(1 − G(1 − u) − u) = 0` on `(0, H)` with `u(0) = 0`,
//! `u(H) = 1`. For `H` large, `w(a) = u(H − a)` is the probability that the
//! process started at any point far above 0 climbs `a` above its start.

use crate::{BbmError, OffspringLaw};
use mc_streams::open01;
use rand::Rng;

/// Finite-difference solution of the hitting-probability equation.
#[derive(Clone, Debug)]
pub struct MaxLaw {
    top: f64,
    h: f64,
    u: Vec<f64>,
}

impl MaxLaw {
    /// Solves on `[0, top]` with `cells` uniform cells.
    ///
    /// With `u = φ e^{y−top}` the linear part becomes `½φ''` and the
    /// equation reads `½φ'' + e^{top−y} N(u) = 0`, where
    /// `N(u) = β(1 − G(1 − u) − u) − u/2 ≤ 0`. Newton on `φ` then has a
    /// negative definite tridiagonal Jacobian.
    pub fn solve(law: &OffspringLaw, top: f64, cells: usize) -> Result<Self, BbmError> {
        if !(top > 0.0) || cells < 4 {
            return Err(BbmError::InvalidConfig("max law needs top > 0 and at least 4 cells".into()));
        }
        let n = cells;
        let h = top / n as f64;
        let beta = law.beta();
        let curvature = Curvature::new(law);
        let nonlinear = |u: f64| -beta * curvature.value(u);
        let slope = |u: f64| -beta * curvature.derivative(u);
        let scale: Vec<f64> = (0..=n).map(|i| (i as f64 * h - top).exp()).collect();
        let mut phi: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let inv_h2 = 1.0 / (h * h);
        let mut converged = false;
        for _ in 0..100 {
            let mut res = vec![0.0; n - 1];
            let mut diag = vec![0.0; n - 1];
            for i in 1..n {
                let u = phi[i] * scale[i];
                res[i - 1] = -(0.5 * (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) * inv_h2 + nonlinear(u) / scale[i]);
                diag[i - 1] = -inv_h2 + slope(u);
            }
            let delta = solve_tridiagonal(0.5 * inv_h2, &diag, 0.5 * inv_h2, &res);
            let mut step: f64 = 0.0;
            for i in 1..n {
                phi[i] += delta[i - 1];
                step = step.max(delta[i - 1].abs() / phi[i].abs().max(1e-300));
            }
            if step < 1e-13 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(BbmError::InvalidConfig("max-law solver did not converge".into()));
        }
        let u = phi.iter().zip(&scale).map(|(p, e)| p * e).collect();
        Ok(Self { top, h, u })
    }

    /// Default resolution: `H = 60`, step 0.01.
    pub fn for_law(law: &OffspringLaw) -> Result<Self, BbmError> {
        Self::solve(law, 60.0, 6000)
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    /// `P_y(reach top)` with absorption at 0.
    pub fn reach_probability(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y >= self.top {
            return 1.0;
        }
        let f = y / self.h;
        let i = (f as usize).min(self.u.len() - 2);
        let w = f - i as f64;
        self.u[i] * (1.0 - w) + self.u[i + 1] * w
    }

    /// `w(a)`: probability that the all-time maximum exceeds the start by `a`.
    pub fn exceed_probability(&self, a: f64) -> f64 {
        if a <= 0.0 {
            1.0
        } else {
            self.reach_probability(self.top - a)
        }
    }

    /// Draws `A` with `P(A ≥ a) = w(a)`. Beyond the table the tail is
    /// continued as `e^{−a}`.
    pub fn sample_excess<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.excess_quantile(open01(rng))
    }

    /// Solves `w(a) = p` for `p ∈ (0, 1]`.
    pub fn excess_quantile(&self, p: f64) -> f64 {
        if p >= 1.0 {
            return 0.0;
        }
        // u is increasing in y, so w(a) = u(top − a) is decreasing in a.
        let j = self.u.partition_point(|&v| v < p);
        if j <= 1 {
            let floor_a = self.top - self.h;
            return floor_a + (self.u[1] / p).ln();
        }
        let (lo, hi) = (self.u[j - 1], self.u[j]);
        let w = if hi > lo { (p - lo) / (hi - lo) } else { 0.0 };
        let y = (j - 1) as f64 * self.h + w * self.h;
        self.top - y
    }
}

/// `W(z, a) = P_z(max ≥ z + a)` on a square grid, with absorption at 0.
///
/// At criticality the barrier's influence decays only like `1/z`, so the law
/// of a subtree's excess depends on where it is rooted. One solve with top
/// `H` yields `W(z, H − z)` for every grid `z`, an anti-diagonal of the table.
#[derive(Clone, Debug)]
pub struct SubtreeMaxTable {
    step: f64,
    rows: usize,
    cols: usize,
    /// `w[iz * cols + ia] = W(iz·step, ia·step)`.
    w: Vec<f64>,
}

impl SubtreeMaxTable {
    /// Grid spacing `step` in both `z` and `a`; each solve uses cells of
    /// width at most `cell`.
    pub fn build(law: &OffspringLaw, z_max: f64, a_max: f64, step: f64, cell: f64) -> Result<Self, BbmError> {
        if !(step > 0.0 && cell > 0.0 && z_max > 0.0 && a_max > 0.0) {
            return Err(BbmError::InvalidConfig("table extents and steps must be positive".into()));
        }
        let rows = (z_max / step).ceil() as usize + 1;
        let cols = (a_max / step).ceil() as usize + 1;
        let mut w = vec![f64::NAN; rows * cols];
        for iz in 0..rows {
            w[iz * cols] = if iz == 0 { 0.0 } else { 1.0 };
        }
        w[1..cols].fill(0.0);
        for k in 1..rows + cols - 1 {
            let top = k as f64 * step;
            let cells = ((top / cell).ceil() as usize).max(8);
            let sol = MaxLaw::solve(law, top, cells)?;
            for iz in 1..rows.min(k) {
                let ia = k - iz;
                if ia < cols {
                    w[iz * cols + ia] = sol.reach_probability(iz as f64 * step);
                }
            }
        }
        Ok(Self { step, rows, cols, w })
    }

    /// Default table for subtrees rooted below `z_max`: step 0.1, excess up
    /// to 50, cells of 0.02.
    pub fn for_law(law: &OffspringLaw, z_max: f64) -> Result<Self, BbmError> {
        Self::build(law, z_max, 50.0, 0.1, 0.02)
    }

    pub fn z_max(&self) -> f64 {
        (self.rows - 1) as f64 * self.step
    }

    pub fn a_max(&self) -> f64 {
        (self.cols - 1) as f64 * self.step
    }

    fn row_pair(&self, z: f64) -> (usize, f64) {
        let f = (z / self.step).clamp(0.0, (self.rows - 1) as f64);
        let i = (f as usize).min(self.rows - 2);
        (i, f - i as f64)
    }

    fn column(&self, i: usize, fz: f64, ia: usize) -> f64 {
        let a = self.w[i * self.cols + ia];
        let b = self.w[(i + 1) * self.cols + ia];
        a * (1.0 - fz) + b * fz
    }

    /// `W(z, a)`; beyond the table `z` is clamped and the tail in `a`
    /// continues as `e^{−a}`.
    pub fn exceed_probability(&self, z: f64, a: f64) -> f64 {
        if a <= 0.0 {
            return if z > 0.0 { 1.0 } else { 0.0 };
        }
        let (i, fz) = self.row_pair(z);
        let fa = a / self.step;
        if fa >= (self.cols - 1) as f64 {
            let edge = self.column(i, fz, self.cols - 1);
            return edge * (self.a_max() - a).exp();
        }
        let ia = fa as usize;
        let (lo, hi) = (self.column(i, fz, ia), self.column(i, fz, ia + 1));
        let t = fa - ia as f64;
        if lo > 0.0 && hi > 0.0 {
            (lo.ln() * (1.0 - t) + hi.ln() * t).exp()
        } else {
            lo * (1.0 - t) + hi * t
        }
    }

    /// Solves `W(z, a) = p` for `a`.
    pub fn excess_quantile(&self, z: f64, p: f64) -> f64 {
        if p >= 1.0 || z <= 0.0 {
            return 0.0;
        }
        let (i, fz) = self.row_pair(z);
        let last = self.cols - 1;
        let edge = self.column(i, fz, last);
        if p <= edge {
            return self.a_max() + (edge / p).ln();
        }
        // W decreases in a: find the first column with value ≤ p.
        let (mut lo, mut hi) = (0usize, last);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.column(i, fz, mid) > p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (wl, wh) = (self.column(i, fz, lo), self.column(i, fz, hi));
        let t = if wl > wh { (wl.ln() - p.ln()) / (wl.ln() - wh.ln()) } else { 0.0 };
        (lo as f64 + t.clamp(0.0, 1.0)) * self.step
    }

    /// Draws the excess `A` of a subtree rooted at `z`.
    pub fn sample_excess<R: Rng + ?Sized>(&self, z: f64, rng: &mut R) -> f64 {
        self.excess_quantile(z, open01(rng))
    }
}

/// `Σ p_k ((1 − u)^k − 1 + k u)` and its derivative, as polynomials in `u`
/// with the leading `u²` (resp. `u`) factored out, so that tiny `u` keeps
/// full relative precision.
struct Curvature {
    /// Coefficients of `u^j`, `j ≥ 2`, stored from `j = 2`.
    coef: Vec<f64>,
}

impl Curvature {
    fn new(law: &OffspringLaw) -> Self {
        let kmax = law.max_offspring();
        let mut coef = vec![0.0; kmax.saturating_sub(1)];
        for (k, &p) in law.probs().iter().enumerate() {
            let mut binom = 1.0;
            for j in 1..=k {
                binom *= (k + 1 - j) as f64 / j as f64;
                if j >= 2 {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    coef[j - 2] += p * sign * binom;
                }
            }
        }
        Self { coef }
    }

    fn value(&self, u: f64) -> f64 {
        u * u * self.coef.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    fn derivative(&self, u: f64) -> f64 {
        u * self.coef.iter().enumerate().rev().fold(0.0, |acc, (i, c)| acc * u + (i + 2) as f64 * c)
    }
}

/// Thomas algorithm for constant off-diagonals.
fn solve_tridiagonal(lower: f64, diag: &[f64], upper: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower * c[i - 1];
        c[i] = upper / m;
        d[i] = (rhs[i] - lower * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
