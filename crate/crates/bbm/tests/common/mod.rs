//! Finite-difference oracle for `Q(x, t) = P_x(ζ > t)`:
//! `Q_t = ½Q_xx − Q_x + β(1 − G(1 − Q) − Q)`, `Q(0, t) = 0`, `Q(·, 0) = 1`.
#![allow(dead_code)]

use bbm_engine::OffspringLaw;

pub struct SurvivalGrid {
    pub dx: f64,
    /// `(t, Q(·, t))` at the requested times.
    pub snapshots: Vec<(f64, Vec<f64>)>,
}

impl SurvivalGrid {
    pub fn at(&self, t: f64, x: f64) -> f64 {
        let (_, q) = self.snapshots.iter().find(|(s, _)| (s - t).abs() < 1e-9).expect("snapshot time");
        let f = x / self.dx;
        let i = f as usize;
        let w = f - i as f64;
        q[i] * (1.0 - w) + q[i + 1] * w
    }
}

fn reaction(law: &OffspringLaw, q: f64) -> f64 {
    law.beta() * (1.0 - law.generating_function(1.0 - q) - q)
}

fn rk4(law: &OffspringLaw, q: f64, h: f64) -> f64 {
    let k1 = reaction(law, q);
    let k2 = reaction(law, q + 0.5 * h * k1);
    let k3 = reaction(law, q + 0.5 * h * k2);
    let k4 = reaction(law, q + h * k3);
    q + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

fn thomas(a: f64, b: f64, c: f64, d: &mut [f64], scratch: &mut [f64]) {
    // Constant-coefficient tridiagonal solve in place.
    let n = d.len();
    scratch[0] = c / b;
    d[0] /= b;
    for i in 1..n {
        let m = b - a * scratch[i - 1];
        scratch[i] = c / m;
        d[i] = (d[i] - a * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= scratch[i] * d[i + 1];
    }
}

/// Strang splitting: exact-enough reaction (RK4) around a Crank–Nicolson
/// transport step, after four backward-Euler start-up steps.
pub fn survival_pde(law: &OffspringLaw, x_max: f64, dx: f64, dt: f64, times: &[f64]) -> SurvivalGrid {
    let n = (x_max / dx).round() as usize;
    let mut q = vec![1.0; n + 1];
    q[0] = 0.0;
    let (diff, adv) = (0.5 / (dx * dx), 1.0 / (2.0 * dx));
    // Operator A q_i = diff (q_{i+1} − 2q_i + q_{i−1}) − adv (q_{i+1} − q_{i−1}).
    let (lo, mid, up) = (diff + adv, -2.0 * diff, diff - adv);
    let mut interior = vec![0.0; n - 1];
    let mut scratch = vec![0.0; n - 1];
    let mut snapshots = Vec::new();
    let mut t = 0.0;
    let mut targets: Vec<f64> = times.to_vec();
    targets.sort_by(f64::total_cmp);
    let mut next = 0;
    let mut step = 0usize;
    while next < targets.len() {
        let h = dt.min(targets[next] - t);
        let implicit_only = step < 4;
        for v in q.iter_mut().skip(1).take(n - 1) {
            *v = rk4(law, *v, 0.5 * h);
        }
        let theta = if implicit_only { 1.0 } else { 0.5 };
        for i in 1..n {
            let explicit = lo * q[i - 1] + mid * q[i] + up * q[i + 1];
            interior[i - 1] = q[i] + (1.0 - theta) * h * explicit;
        }
        // Boundary q_n = 1 enters the last row.
        interior[n - 2] += theta * h * up * q[n];
        thomas(-theta * h * lo, 1.0 - theta * h * mid, -theta * h * up, &mut interior, &mut scratch);
        q[1..n].copy_from_slice(&interior);
        for v in q.iter_mut().skip(1).take(n - 1) {
            *v = rk4(law, *v, 0.5 * h);
        }
        t += h;
        step += 1;
        if (t - targets[next]).abs() < 1e-12 {
            snapshots.push((targets[next], q.clone()));
            next += 1;
        }
    }
    SurvivalGrid { dx, snapshots }
}
