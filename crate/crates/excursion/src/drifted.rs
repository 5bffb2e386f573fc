use crate::{ExcursionError, MinResult};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use taboo_diffusion::{ExcursionTracker, Substep, TabooConfig, TabooPath, TabooWalker};

type Coef = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The functional `min_{s ≤ g} (b(s) K_s + d(s))` and its runner-up outside a
/// window of radius `θ/√γ` around the minimizer.
#[derive(Clone)]
pub struct DriftedMinProblem {
    pub gamma: f64,
    pub g_horizon: f64,
    pub theta: f64,
    b_fn: Coef,
    d_fn: Coef,
    d_nondecreasing: bool,
    /// Candidates for the runner-up are kept while within this many `√γ` of
    /// the running minimum.
    pub second_margin: f64,
}

impl std::fmt::Debug for DriftedMinProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DriftedMinProblem")
            .field("gamma", &self.gamma)
            .field("g_horizon", &self.g_horizon)
            .field("theta", &self.theta)
            .finish_non_exhaustive()
    }
}

/// Checks on how close a problem is to the idealized `b ≡ 1, d = γs` case.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemDiagnostics {
    /// `g·√γ`; should be large.
    pub horizon_scale: f64,
    pub short_horizon_warning: bool,
    pub sup_b_deviation: f64,
    pub sup_d_relative_deviation: f64,
}

impl DriftedMinProblem {
    /// `b ≡ 1`, `d(s) = γs`.
    pub fn standard(gamma: f64, g_horizon: f64, theta: f64) -> Result<Self, ExcursionError> {
        Self::new(gamma, g_horizon, theta, |_| 1.0, move |s| gamma * s, true)
    }

    /// General coefficients. Set `d_nondecreasing` only if `d` never decreases;
    /// it enables exact early stopping, since `b K ≥ 0` makes `d(s)` a lower
    /// bound on all later values.
    pub fn new(
        gamma: f64,
        g_horizon: f64,
        theta: f64,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d_nondecreasing: bool,
    ) -> Result<Self, ExcursionError> {
        if !(gamma > 0.0) {
            return Err(ExcursionError::Domain { what: "gamma", value: gamma });
        }
        if !(g_horizon > 0.0) {
            return Err(ExcursionError::Domain { what: "horizon", value: g_horizon });
        }
        if !(theta >= 0.0) {
            return Err(ExcursionError::Domain { what: "theta", value: theta });
        }
        Ok(Self { gamma, g_horizon, theta, b_fn: Arc::new(b), d_fn: Arc::new(d), d_nondecreasing, second_margin: 20.0 })
    }

    #[inline]
    pub fn b(&self, s: f64) -> f64 {
        (self.b_fn)(s)
    }

    #[inline]
    pub fn d(&self, s: f64) -> f64 {
        (self.d_fn)(s)
    }

    #[inline]
    pub fn value(&self, s: f64, k: f64) -> f64 {
        self.b(s) * k + self.d(s)
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.theta / self.gamma.sqrt()
    }

    pub fn diagnostics(&self, grid: &[f64]) -> ProblemDiagnostics {
        let mut sup_b: f64 = 0.0;
        let mut sup_d: f64 = 0.0;
        for &s in grid.iter().filter(|&&s| s > 0.0 && s <= self.g_horizon) {
            sup_b = sup_b.max((self.b(s) - 1.0).abs());
            sup_d = sup_d.max((self.d(s) / (self.gamma * s) - 1.0).abs());
        }
        let horizon_scale = self.g_horizon * self.gamma.sqrt();
        ProblemDiagnostics {
            horizon_scale,
            short_horizon_warning: horizon_scale < 10.0,
            sup_b_deviation: sup_b,
            sup_d_relative_deviation: sup_d,
        }
    }
}

/// Streaming minimum of `b(s)K + d(s)`.
#[derive(Debug)]
pub struct DriftedMinTracker<'p> {
    problem: &'p DriftedMinProblem,
    best: f64,
    best_time: f64,
    band: f64,
    stored: Vec<(f64, f64)>,
    pruned_len: usize,
    /// Runner-up over `stored`, valid unless the minimizer moved.
    second: f64,
    second_stale: bool,
}

impl<'p> DriftedMinTracker<'p> {
    pub fn new(problem: &'p DriftedMinProblem) -> Self {
        Self {
            problem,
            best: f64::INFINITY,
            best_time: 0.0,
            band: problem.second_margin * problem.gamma.sqrt(),
            stored: Vec::new(),
            pruned_len: 64,
            second: f64::INFINITY,
            second_stale: false,
        }
    }

    /// Offers the value `k` of the taboo path at time `s`.
    #[inline]
    pub fn observe(&mut self, s: f64, k: f64) {
        if s > self.problem.g_horizon {
            return;
        }
        let f = self.problem.value(s, k);
        if f < self.best || (f == self.best && s < self.best_time) {
            self.best = f;
            self.best_time = s;
            self.second_stale = true;
        }
        if f < self.best + self.band {
            self.stored.push((s, f));
            if !self.second_stale && (s - self.best_time).abs() >= self.problem.exclusion_radius() {
                self.second = self.second.min(f);
            }
            if self.stored.len() > 2 * self.pruned_len {
                let cut = self.best + self.band;
                self.stored.retain(|p| p.1 < cut);
                self.pruned_len = self.stored.len().max(64);
            }
        }
    }

    /// Offers the lowest point of a substep.
    #[inline]
    pub fn observe_substep(&mut self, s: &Substep) {
        self.observe(s.low_time, s.low);
    }

    fn runner_up(&mut self) -> f64 {
        if self.second_stale {
            self.second = self.scan_runner_up();
            self.second_stale = false;
        }
        self.second
    }

    fn scan_runner_up(&self) -> f64 {
        let w = self.problem.exclusion_radius();
        self.stored.iter().filter(|p| (p.0 - self.best_time).abs() >= w).map(|p| p.1).fold(f64::INFINITY, f64::min)
    }

    /// True once no value after time `s` can change the minimum or the
    /// runner-up (requires nondecreasing `d`).
    pub fn can_stop(&mut self, s: f64) -> bool {
        if s >= self.problem.g_horizon {
            return true;
        }
        if !self.problem.d_nondecreasing {
            return false;
        }
        let floor = self.problem.d(s);
        floor >= self.best && floor >= self.runner_up()
    }

    pub fn current_min(&self) -> f64 {
        self.best
    }

    pub fn finish(&self) -> MinResult {
        MinResult { min_value: self.best, argmin: self.best_time, second_min: self.scan_runner_up() }
    }
}

/// Minimum of `b(s)K_s + d(s)` over a recorded path on `[0, g]`, using the
/// per-step lows (bridge minima when the path sampled them).
pub fn drifted_taboo_min(problem: &DriftedMinProblem, path: &TabooPath) -> Result<MinResult, ExcursionError> {
    if path.horizon() < problem.g_horizon * (1.0 - 1e-12) {
        return Err(ExcursionError::PathTooShort { have: path.horizon(), need: problem.g_horizon });
    }
    let mut tracker = DriftedMinTracker::new(problem);
    for (&s, &k) in path.low_times().iter().zip(path.lows()) {
        tracker.observe(s, k);
    }
    Ok(tracker.finish())
}

/// Result of [`simulate_drifted_min`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftedMinOutcome {
    pub result: MinResult,
    /// Clock time at which the minimum and runner-up were settled.
    pub stopped_at: f64,
    pub clamp_events: u64,
}

/// Simulates a taboo path from `cfg.start` only as long as needed to settle
/// the minimum and runner-up of `b K + d` on `[0, g]`.
///
/// `cfg.bridge_low_below` should be set so that within-step minima are seen.
pub fn simulate_drifted_min<R: Rng + ?Sized>(
    problem: &DriftedMinProblem,
    cfg: &TabooConfig,
    rng: &mut R,
) -> Result<DriftedMinOutcome, ExcursionError> {
    let mut walker = TabooWalker::new(cfg)?;
    let mut tracker = DriftedMinTracker::new(problem);
    let mut buf: Vec<Substep> = Vec::new();
    tracker.observe(0.0, walker.value());
    while walker.time() < problem.g_horizon {
        let h = cfg.step.min(problem.g_horizon - walker.time());
        walker.advance(h, rng, &mut buf);
        for s in &buf {
            tracker.observe_substep(s);
        }
        if problem.d(walker.time()) >= tracker.current_min() && tracker.can_stop(walker.time()) {
            break;
        }
    }
    Ok(DriftedMinOutcome { result: tracker.finish(), stopped_at: walker.time(), clamp_events: walker.clamp_events() })
}

/// Minimum of `a + γu/2` over the excursions of a simulated taboo path, with
/// `u` restricted to `window`. Stops once `γℓ/2` exceeds the runner-up: every
/// later excursion has `u ≥ ℓ`.
pub fn excursion_ppp_min_from_taboo<R: Rng + ?Sized>(
    gamma: f64,
    window: (f64, f64),
    cfg: &TabooConfig,
    rng: &mut R,
) -> Result<MinResult, ExcursionError> {
    if !(gamma > 0.0) {
        return Err(ExcursionError::Domain { what: "gamma", value: gamma });
    }
    let mut walker = TabooWalker::new(cfg)?;
    let mut tracker = ExcursionTracker::new(0.5);
    let mut buf: Vec<Substep> = Vec::new();
    let (mut best, mut best_u, mut second) = (f64::INFINITY, 0.0, f64::INFINITY);
    let max_time = cfg.horizon;
    while walker.time() < max_time {
        walker.advance(cfg.step, rng, &mut buf);
        for s in &buf {
            tracker.observe(s);
        }
        for e in tracker.drain() {
            if e.u < window.0 || e.u > window.1 {
                continue;
            }
            let score = e.a + gamma * e.u / 2.0;
            if score < best {
                second = best;
                best = score;
                best_u = e.u;
            } else {
                second = second.min(score);
            }
        }
        let floor = gamma * walker.local_time() / 2.0;
        if (floor >= second && walker.local_time() >= window.0) || walker.local_time() > window.1 {
            break;
        }
    }
    if !best.is_finite() {
        return Err(ExcursionError::EmptyWindow { lo: window.0, hi: window.1 });
    }
    Ok(MinResult { min_value: best, argmin: best_u, second_min: second })
}

/// `(sup |(bK+d)/(K+γs) − 1|, sup|b−1| + sup|d/(γs) − 1|)` over the grid
/// points of `path` in `(0, g]`. The first never exceeds the second.
pub fn ratio_bound_check(problem: &DriftedMinProblem, path: &TabooPath) -> (f64, f64) {
    let mut lhs: f64 = 0.0;
    let (mut sb, mut sd): (f64, f64) = (0.0, 0.0);
    for (&s, &k) in path.times().iter().zip(path.values()) {
        if s <= 0.0 || s > problem.g_horizon {
            continue;
        }
        let ideal = k + problem.gamma * s;
        lhs = lhs.max((problem.value(s, k) / ideal - 1.0).abs());
        sb = sb.max((problem.b(s) - 1.0).abs());
        sd = sd.max((problem.d(s) / (problem.gamma * s) - 1.0).abs());
    }
    (lhs, sb + sd)
}
