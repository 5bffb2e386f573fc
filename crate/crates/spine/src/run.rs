use crate::{SpineError, TimeGeometry};
use bbm_engine::{z_term, BbmConfig, BbmEngine, BbmRunResult, OffspringLaw, SubtreeMaxTable};
use excursion_ppp::{drifted_taboo_min, DriftedMinProblem, DriftedMinTracker, MinResult};
use mc_streams::bridge::{bridge_min_above, bridge_point};
use mc_streams::{open01, standard_normal};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use taboo_diffusion::{Substep, TabooConfig, TabooPath, TabooScheme, TabooWalker};

/// How the independent subtrees hanging off the spine are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubtreeMode {
    /// Each subtree is a full engine run up to the spine's end time.
    Explicit,
    /// Each subtree's all-time maximum is drawn from the exact law of the
    /// maximum of the process absorbed at 0, rooted at its branch position.
    /// Subtrees rooted more than the table's excess range below the spine
    /// maximum are not drawn.
    Tabulated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpineConfig {
    /// The spine runs on `[0, t^b]`.
    pub b_exponent: f64,
    /// Overrides `t^b` as the end time.
    pub end_time: Option<f64>,
    /// Step of the taboo clock `τ`.
    pub clock_step: f64,
    pub scheme: TabooScheme,
    /// Real times at which the population is summarized.
    pub checkpoints: Vec<f64>,
    pub subtrees: SubtreeMode,
    /// Engine grid step for explicit subtrees.
    pub subtree_dt: f64,
    pub population_cap: usize,
    pub record_samples: bool,
}

impl Default for SpineConfig {
    fn default() -> Self {
        Self {
            b_exponent: 0.9,
            end_time: None,
            clock_step: 1e-4,
            scheme: TabooScheme::BesselSplit,
            checkpoints: Vec::new(),
            subtrees: SubtreeMode::Tabulated,
            subtree_dt: 0.01,
            population_cap: 1_000_000,
            record_samples: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchEvent {
    pub time: f64,
    pub position: f64,
    /// Size-biased offspring count; one child continues as the spine.
    pub offspring: usize,
}

/// One non-spine child and the maximum of its subtree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubtreeOutcome {
    /// Index into `branch_events`.
    pub event: usize,
    pub root_time: f64,
    pub root_position: f64,
    pub all_time_max: f64,
    /// Root time for tabulated subtrees.
    pub argmax_time: f64,
    pub run: Option<BbmRunResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpineCheckpoint {
    pub time: f64,
    pub spine_position: f64,
    /// Filled only with explicit subtrees.
    pub population: Option<usize>,
    pub max_position: Option<f64>,
    pub z: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpineRun {
    pub x: f64,
    pub horizon: f64,
    pub end_time: f64,
    /// `(s, X̃_ξ(s))` on the clock grid.
    pub spine_samples: Vec<(f64, f64)>,
    pub branch_events: Vec<BranchEvent>,
    pub subtree_results: Vec<SubtreeOutcome>,
    /// Tabulated mode: children too far below the spine maximum to matter.
    pub skipped_subtrees: u64,
    pub checkpoints: Vec<SpineCheckpoint>,
    /// `𝔐̃`, `𝔪̃`.
    pub all_time_max: f64,
    pub argmax_time: f64,
    /// `M̃`, `m̃`.
    pub spine_max: f64,
    pub spine_argmax: f64,
    pub clamp_events: u64,
    /// Set when `L_t − x` is below `t^{1/6}`.
    pub regime_warning: bool,
}

/// `((L_t − 𝔐̃)/t^{1/6}, 𝔪̃/t^{5/6})` and the same for the spine alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaledMaxima {
    pub height: f64,
    pub time: f64,
    pub spine_height: f64,
    pub spine_time: f64,
}

impl SpineRun {
    pub fn rescaled(&self, geom: &TimeGeometry) -> RescaledMaxima {
        let (h, w) = (geom.height_scale(), geom.time_scale());
        RescaledMaxima {
            height: (geom.l0() - self.all_time_max) / h,
            time: self.argmax_time / w,
            spine_height: (geom.l0() - self.spine_max) / h,
            spine_time: self.spine_argmax / w,
        }
    }
}

/// `(𝔐̃ − M̃, |𝔪̃ − m̃|)`.
pub fn spine_vs_population_gap(run: &SpineRun) -> (f64, f64) {
    (run.all_time_max - run.spine_max, (run.argmax_time - run.spine_argmax).abs())
}

/// The spine's height as a drifted taboo minimum: with `J = 1 − K`,
/// `(L_t − X̃_ξ(s))/L_t = b(r) J_r + d(r)` at `r = τ(s)`.
pub fn spine_problem(geom: &TimeGeometry, clock_end: f64) -> Result<DriftedMinProblem, SpineError> {
    let (gb, gd) = (*geom, *geom);
    Ok(DriftedMinProblem::new(
        geom.gamma(),
        clock_end,
        0.0,
        move |r| gb.spine_scale(r).unwrap_or(0.0),
        move |r| gd.spine_offset(r).unwrap_or(1.0),
        true,
    )?)
}

/// Simulates the branching process with spine. Build once per
/// `(law, geometry, config)`; the subtree table is shared across runs.
#[derive(Clone, Debug)]
pub struct SpineSimulator {
    law: OffspringLaw,
    geom: TimeGeometry,
    cfg: SpineConfig,
    table: Option<Arc<SubtreeMaxTable>>,
}

impl SpineSimulator {
    pub fn new(law: OffspringLaw, geom: TimeGeometry, cfg: SpineConfig) -> Result<Self, SpineError> {
        let table = match cfg.subtrees {
            SubtreeMode::Tabulated => Some(Arc::new(SubtreeMaxTable::for_law(&law, geom.l0())?)),
            SubtreeMode::Explicit => None,
        };
        Self::with_table(law, geom, cfg, table)
    }

    pub fn with_table(
        law: OffspringLaw,
        geom: TimeGeometry,
        cfg: SpineConfig,
        table: Option<Arc<SubtreeMaxTable>>,
    ) -> Result<Self, SpineError> {
        if cfg.end_time.is_none() && !(cfg.b_exponent > 5.0 / 6.0 && cfg.b_exponent < 1.0) {
            return Err(SpineError::Domain { what: "b exponent (needs 5/6 < b < 1)", value: cfg.b_exponent });
        }
        if let Some(e) = cfg.end_time {
            if !(e > 0.0 && e < geom.horizon) {
                return Err(SpineError::Domain { what: "end time", value: e });
            }
        }
        if !(cfg.clock_step > 0.0) || !(cfg.subtree_dt > 0.0) {
            return Err(SpineError::InvalidConfig("steps must be positive".into()));
        }
        if cfg.subtrees == SubtreeMode::Tabulated && table.as_ref().is_none_or(|t| t.z_max() < geom.l0()) {
            return Err(SpineError::InvalidConfig("tabulated subtrees need a table reaching L_t".into()));
        }
        Ok(Self { law, geom, cfg, table })
    }

    pub fn geometry(&self) -> &TimeGeometry {
        &self.geom
    }

    pub fn config(&self) -> &SpineConfig {
        &self.cfg
    }

    pub fn end_time(&self) -> f64 {
        self.cfg.end_time.unwrap_or_else(|| self.geom.spine_end(self.cfg.b_exponent))
    }

    pub fn run<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> Result<SpineRun, SpineError> {
        let geom = &self.geom;
        let l0 = geom.l0();
        if !(x > 0.0 && x < l0) {
            return Err(SpineError::Domain { what: "start (needs 0 < x < L_t)", value: x });
        }
        let end = self.end_time();
        let clock_end = geom.tau(end)?;
        let mut marks: Vec<f64> = self.cfg.checkpoints.iter().copied().filter(|&c| c > 0.0 && c <= end).collect();
        marks.sort_by(f64::total_cmp);
        marks.dedup();
        let clock_marks = marks.iter().map(|&m| geom.tau(m)).collect::<Result<Vec<_>, _>>()?;

        let taboo = TabooConfig {
            start: 1.0 - x / l0,
            step: self.cfg.clock_step,
            horizon: clock_end,
            bridge_low_below: Some(0.5),
            scheme: self.cfg.scheme,
            ..Default::default()
        };
        let mut walker = TabooWalker::new(&taboo)?;
        let problem = spine_problem(geom, clock_end)?;
        let mut tracker = DriftedMinTracker::new(&problem);
        tracker.observe(0.0, walker.value());

        let rate = self.law.spine_rate();
        let mut samples = Vec::new();
        if self.cfg.record_samples {
            samples.push((0.0, x));
        }
        let mut events = Vec::new();
        let mut spine_at_marks = Vec::with_capacity(marks.len());
        let mut buf: Vec<Substep> = Vec::new();
        let mut times: Vec<f64> = Vec::new();
        let mut next_mark = 0;
        while walker.time() < clock_end {
            let mut h = self.cfg.clock_step.min(clock_end - walker.time());
            if next_mark < clock_marks.len() {
                h = h.min(clock_marks[next_mark] - walker.time());
            }
            walker.advance(h, rng, &mut buf);
            for sub in &buf {
                let s0 = geom.tau_inv(sub.t0)?;
                let s1 = geom.tau_inv(sub.t1)?.min(end);
                let mean = rate * (s1 - s0);
                let n = if mean > 0.0 {
                    Poisson::new(mean).map_err(|_| SpineError::Domain { what: "event mean", value: mean })?.sample(rng)
                        as usize
                } else {
                    0
                };
                if n == 0 {
                    tracker.observe_substep(sub);
                    continue;
                }
                times.clear();
                times.extend((0..n).map(|_| s0 + open01(rng) * (s1 - s0)));
                times.sort_by(f64::total_cmp);
                // Points of the bridge from (t0, k0) to (t1, k1) at the event
                // clocks, then a fresh conditioned minimum on each piece, so
                // positions and lows are drawn jointly.
                let (mut r_prev, mut j_prev) = (sub.t0, sub.k0);
                for &s in &times {
                    let r = geom.tau(s)?.clamp(r_prev, sub.t1);
                    let j = bridge_point_above(j_prev, sub.k1, r - r_prev, sub.t1 - r, rng)
                        .clamp(taboo.boundary_guard, 1.0 - taboo.boundary_guard);
                    observe_piece(&mut tracker, (r_prev, j_prev), (r, j), rng);
                    (r_prev, j_prev) = (r, j);
                    events.push(BranchEvent {
                        time: s,
                        position: geom.l(s)? * (1.0 - j),
                        offspring: self.law.sample_size_biased(rng),
                    });
                }
                observe_piece(&mut tracker, (r_prev, j_prev), (sub.t1, sub.k1), rng);
            }
            let r = walker.time();
            let s = geom.tau_inv(r)?;
            let pos = geom.l_at_clock(r)? * (1.0 - walker.value());
            if !(pos >= 0.0 && pos <= geom.l(s)?) {
                return Err(SpineError::Invariant(format!("spine at {pos} outside [0, L({s})]")));
            }
            if self.cfg.record_samples {
                samples.push((s, pos));
            }
            while next_mark < clock_marks.len() && clock_marks[next_mark] <= r {
                spine_at_marks.push(pos);
                next_mark += 1;
            }
        }
        let spine_min: MinResult = tracker.finish();
        let spine_max = l0 * (1.0 - spine_min.min_value);
        let spine_argmax = geom.tau_inv(spine_min.argmin)?;

        let (subtrees, skipped) = match self.cfg.subtrees {
            SubtreeMode::Explicit => (self.explicit_subtrees(&events, end, &marks, rng)?, 0),
            SubtreeMode::Tabulated => self.tabulated_subtrees(&events, spine_max, rng),
        };
        let (mut all_time_max, mut argmax_time) = (spine_max, spine_argmax);
        for st in &subtrees {
            if st.all_time_max > all_time_max || (st.all_time_max == all_time_max && st.argmax_time < argmax_time) {
                all_time_max = st.all_time_max;
                argmax_time = st.argmax_time;
            }
        }
        let checkpoints = marks
            .iter()
            .zip(&spine_at_marks)
            .map(|(&time, &spine_position)| self.checkpoint(time, spine_position, &subtrees))
            .collect();
        Ok(SpineRun {
            x,
            horizon: geom.horizon,
            end_time: end,
            spine_samples: samples,
            branch_events: events,
            subtree_results: subtrees,
            skipped_subtrees: skipped,
            checkpoints,
            all_time_max,
            argmax_time,
            spine_max,
            spine_argmax,
            clamp_events: walker.clamp_events(),
            regime_warning: l0 - x < geom.height_scale(),
        })
    }

    fn explicit_subtrees<R: Rng + ?Sized>(
        &self,
        events: &[BranchEvent],
        end: f64,
        marks: &[f64],
        rng: &mut R,
    ) -> Result<Vec<SubtreeOutcome>, SpineError> {
        let cfg = BbmConfig {
            horizon: end,
            dt: self.cfg.subtree_dt,
            population_cap: self.cfg.population_cap,
            checkpoints: marks.to_vec(),
            barrier_horizon: Some(self.geom.horizon),
            ..Default::default()
        };
        let mut engine = BbmEngine::new();
        let mut out = Vec::new();
        for (i, ev) in events.iter().enumerate() {
            if ev.time >= end || ev.position <= 0.0 {
                continue;
            }
            for _ in 1..ev.offspring {
                let run = engine.run_population(&[ev.position], ev.time, &self.law, &cfg, rng)?;
                out.push(SubtreeOutcome {
                    event: i,
                    root_time: ev.time,
                    root_position: ev.position,
                    all_time_max: run.all_time_max,
                    argmax_time: run.argmax_time,
                    run: Some(run),
                });
            }
        }
        Ok(out)
    }

    fn tabulated_subtrees<R: Rng + ?Sized>(
        &self,
        events: &[BranchEvent],
        spine_max: f64,
        rng: &mut R,
    ) -> (Vec<SubtreeOutcome>, u64) {
        let table = self.table.as_ref().expect("validated at construction");
        let floor = spine_max - table.a_max();
        let mut out = Vec::new();
        let mut skipped = 0;
        for (i, ev) in events.iter().enumerate() {
            let children = ev.offspring.saturating_sub(1);
            if ev.position <= floor {
                skipped += children as u64;
                continue;
            }
            for _ in 0..children {
                let excess = table.sample_excess(ev.position, rng);
                out.push(SubtreeOutcome {
                    event: i,
                    root_time: ev.time,
                    root_position: ev.position,
                    all_time_max: ev.position + excess,
                    argmax_time: ev.time,
                    run: None,
                });
            }
        }
        (out, skipped)
    }

    fn checkpoint(&self, time: f64, spine_position: f64, subtrees: &[SubtreeOutcome]) -> SpineCheckpoint {
        if self.cfg.subtrees != SubtreeMode::Explicit {
            return SpineCheckpoint { time, spine_position, population: None, max_position: None, z: None };
        }
        let mut population = 1;
        let mut max_position = spine_position;
        let mut z = z_term(spine_position, time, self.geom.horizon);
        for cp in subtrees.iter().filter_map(|st| st.run.as_ref()?.checkpoint_at(time)) {
            population += cp.population;
            if let Some(m) = cp.max_position {
                max_position = max_position.max(m);
            }
            z += cp.z.unwrap_or(0.0);
        }
        SpineCheckpoint {
            time,
            spine_position,
            population: Some(population),
            max_position: Some(max_position),
            z: Some(z),
        }
    }
}

/// Brownian bridge from `a` to `b` observed `v1` after `a` and `v2` before
/// `b`, conditioned to stay above 0 (by rejection on the two halves).
fn bridge_point_above<R: Rng + ?Sized>(a: f64, b: f64, v1: f64, v2: f64, rng: &mut R) -> f64 {
    let var = v1 + v2;
    if var <= 0.0 || v1 <= 0.0 {
        return a;
    }
    let f = v1 / var;
    let mut y = a;
    for _ in 0..1000 {
        y = bridge_point(a, b, var, f, standard_normal(rng));
        if y <= 0.0 {
            continue;
        }
        let keep = -(-2.0 * a * y / v1).exp_m1() * if v2 > 0.0 { -(-2.0 * y * b / v2).exp_m1() } else { 1.0 };
        if open01(rng) < keep {
            return y;
        }
    }
    y.max(0.0)
}

/// Offers the conditioned minimum of the bridge between two clock points.
fn observe_piece<R: Rng + ?Sized>(tracker: &mut DriftedMinTracker<'_>, p: (f64, f64), q: (f64, f64), rng: &mut R) {
    let (lo_time, lo) = if p.1 <= q.1 { p } else { q };
    let var = q.0 - p.0;
    if var > 0.0 && lo < 0.5 {
        let low = bridge_min_above(p.1, q.1, var, 0.0, open01(rng)).min(lo);
        tracker.observe(lo_time, low);
    } else {
        tracker.observe(lo_time, lo);
    }
}

/// One run of the branching process with spine from `x` on `[0, t^b]`.
/// Subtrees are explicit when `L_t ≤ 12` and tabulated otherwise.
pub fn simulate_spine_run<R: Rng + ?Sized>(
    x: f64,
    law: &OffspringLaw,
    geom: &TimeGeometry,
    b_exponent: f64,
    rng: &mut R,
) -> Result<SpineRun, SpineError> {
    let subtrees = if geom.l0() <= 12.0 { SubtreeMode::Explicit } else { SubtreeMode::Tabulated };
    let cfg = SpineConfig { b_exponent, subtrees, ..Default::default() };
    SpineSimulator::new(law.clone(), *geom, cfg)?.run(x, rng)
}

/// `(M̃, m̃)` of the spine alone, via the drifted taboo minimum of one
/// simulated clock path.
pub fn spine_only_statistics<R: Rng + ?Sized>(
    geom: &TimeGeometry,
    x: f64,
    cfg: &SpineConfig,
    rng: &mut R,
) -> Result<(f64, f64), SpineError> {
    let (_, min) = spine_only_path(geom, x, cfg, rng)?;
    Ok((geom.l0() * (1.0 - min.min_value), geom.tau_inv(min.argmin)?))
}

/// The clock path `J = 1 − K` behind [`spine_only_statistics`] and its
/// drifted minimum.
pub fn spine_only_path<R: Rng + ?Sized>(
    geom: &TimeGeometry,
    x: f64,
    cfg: &SpineConfig,
    rng: &mut R,
) -> Result<(TabooPath, MinResult), SpineError> {
    if !(x > 0.0 && x < geom.l0()) {
        return Err(SpineError::Domain { what: "start (needs 0 < x < L_t)", value: x });
    }
    let end = cfg.end_time.unwrap_or_else(|| geom.spine_end(cfg.b_exponent));
    let clock_end = geom.tau(end)?;
    let taboo = TabooConfig {
        start: 1.0 - x / geom.l0(),
        step: cfg.clock_step,
        horizon: clock_end,
        bridge_low_below: Some(0.5),
        scheme: cfg.scheme,
        ..Default::default()
    };
    let path = TabooPath::simulate(&taboo, rng)?;
    let min = drifted_taboo_min(&spine_problem(geom, clock_end)?, &path)?;
    Ok((path, min))
}
