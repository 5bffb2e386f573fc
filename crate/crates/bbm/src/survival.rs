use crate::{BbmConfig, BbmEngine, BbmError, OffspringLaw};
use mc_streams::Streams;
use rand::Rng;
use serde::{Deserialize, Serialize};
use stat_lab::{MeanEstimate, ProportionEstimate};
use statrs::function::erf::erfc;
use std::sync::Arc;

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `P_x(τ_0 > s)` for a single Brownian particle with drift −1:
/// `Φ((x − s)/√s) − e^{2x} Φ((−x − s)/√s)`.
pub fn absorption_survival(x: f64, s: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if s <= 0.0 {
        return 1.0;
    }
    let r = s.sqrt();
    let reflected = normal_cdf((-x - s) / r);
    let second = if reflected > 0.0 { (2.0 * x + reflected.ln()).exp() } else { 0.0 };
    (normal_cdf((x - s) / r) - second).clamp(0.0, 1.0)
}

/// One point of `v ↦ P_x(ζ > t + v t^{2/3} | ζ > t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub v: f64,
    pub estimate: ProportionEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalSurvival {
    pub x: f64,
    pub t: f64,
    pub attempts: u64,
    pub successes: u64,
    pub curve: Vec<SurvivalPoint>,
    /// Set when `L_t − x` is small, where the limit is not expected to apply.
    pub regime_warning: bool,
}

/// Rejection estimate of conditional survival. Run `i` uses substream `i`;
/// runs are drawn until `successes` of them survive past `t` or
/// `max_attempts` are spent.
#[allow(clippy::too_many_arguments)]
pub fn conditional_survival(
    x: f64,
    t: f64,
    vs: &[f64],
    law: &OffspringLaw,
    dt: f64,
    successes: usize,
    max_attempts: u64,
    streams: &Streams,
) -> Result<ConditionalSurvival, BbmError> {
    if !(x > 0.0) {
        return Err(BbmError::Domain { what: "x", value: x });
    }
    if !(t > 0.0) {
        return Err(BbmError::Domain { what: "t", value: t });
    }
    if let Some(&v) = vs.iter().find(|&&v| !(v > 0.0)) {
        return Err(BbmError::Domain { what: "v", value: v });
    }
    let scale = t.powf(2.0 / 3.0);
    let v_max = vs.iter().copied().fold(0.0, f64::max);
    let cfg = BbmConfig { horizon: t + v_max * scale, dt, track_maximum: false, ..Default::default() };
    let mut engine = BbmEngine::new();
    let mut kept = vec![0u64; vs.len()];
    let (mut attempts, mut got) = (0u64, 0usize);
    while got < successes && attempts < max_attempts {
        let r = engine.run(x, law, &cfg, &mut streams.stream(0, attempts))?;
        attempts += 1;
        if r.survived_to(t) {
            got += 1;
            for (k, &v) in kept.iter_mut().zip(vs) {
                if r.survived_to(t + v * scale) {
                    *k += 1;
                }
            }
        }
    }
    if got < successes {
        return Err(BbmError::InsufficientSample { needed: successes, got });
    }
    Ok(ConditionalSurvival {
        x,
        t,
        attempts,
        successes: got as u64,
        curve: vs
            .iter()
            .zip(&kept)
            .map(|(&v, &k)| SurvivalPoint { v, estimate: ProportionEstimate::new(k, got as u64) })
            .collect(),
        regime_warning: crate::barrier(t, 0.0) - x < 2.0 * t.powf(1.0 / 6.0),
    })
}

/// Fixed-effort multilevel splitting in time for `P_x(ζ > t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingPlan {
    /// Increasing stage ends; every target time must be among them.
    pub stages: Vec<f64>,
    /// Populations carried through each stage.
    pub effort: usize,
    /// Independent repetitions, used for the error bar.
    pub repeats: usize,
    pub dt: f64,
    /// Longest stretch over which one particle's subtree is simulated before
    /// its descendants are queued individually.
    pub chunk: f64,
    pub population_cap: usize,
}

impl SplittingPlan {
    /// Stages growing geometrically by `ratio` from `first`, with the targets
    /// inserted.
    pub fn geometric(targets: &[f64], first: f64, ratio: f64, effort: usize, repeats: usize, dt: f64) -> Self {
        let last = targets.iter().copied().fold(0.0, f64::max);
        let mut stages = Vec::new();
        let mut s = first;
        while s < last {
            stages.push(s);
            s *= ratio;
        }
        stages.extend_from_slice(targets);
        stages.sort_by(f64::total_cmp);
        stages.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        Self { stages, effort, repeats, dt, chunk: 4.0 * dt, population_cap: 1_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingEstimate {
    pub t: f64,
    pub p: f64,
    pub std_err: f64,
    /// 3σ half-width over repeats.
    pub ci: f64,
}

/// Estimates `P_x(ζ > t)` for each target. Populations surviving a stage are
/// resampled (each survivor gets `⌊N/S⌋` copies, the remainder goes to
/// distinct random survivors) and continued independently; the product of
/// stage survival fractions is unbiased.
///
/// Populations are advanced lazily: a stage is passed as soon as one
/// particle's subtree reaches its end, and the remaining particles stay
/// frozen until a later stage needs them. Subtrees are independent given
/// their roots, so this changes the cost, not the law.
pub fn survival_splitting(
    x: f64,
    targets: &[f64],
    law: &OffspringLaw,
    plan: &SplittingPlan,
    streams: &Streams,
) -> Result<Vec<SplittingEstimate>, BbmError> {
    let runs = survival_splitting_repeats(x, targets, law, plan, streams)?;
    Ok(targets
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let a = MeanEstimate::from_iter(runs.iter().map(|r| r[k]));
            SplittingEstimate { t, p: a.mean(), std_err: a.std_err(), ci: a.ci3() }
        })
        .collect())
}

/// Per-repeat splitting products, `out[repeat][target]`.
pub fn survival_splitting_repeats(
    x: f64,
    targets: &[f64],
    law: &OffspringLaw,
    plan: &SplittingPlan,
    streams: &Streams,
) -> Result<Vec<Vec<f64>>, BbmError> {
    if !(x > 0.0) {
        return Err(BbmError::Domain { what: "x", value: x });
    }
    if plan.effort == 0 || plan.repeats < 2 {
        return Err(BbmError::InvalidConfig("splitting needs effort ≥ 1 and at least 2 repeats".into()));
    }
    if let Some(&t) = targets.iter().find(|t| !plan.stages.iter().any(|s| (s - *t).abs() < 1e-9)) {
        return Err(BbmError::InvalidConfig(format!("target {t} is not a stage end")));
    }
    if !(plan.chunk > 0.0) {
        return Err(BbmError::InvalidConfig("splitting chunk must be positive".into()));
    }
    let mut out = Vec::with_capacity(plan.repeats);
    let mut engine = BbmEngine::new();
    let cfg =
        BbmConfig { dt: plan.dt, track_maximum: false, population_cap: plan.population_cap, ..Default::default() };
    for rep in 0..plan.repeats {
        let rs = streams.child(rep as u64);
        let mut states = vec![LazyPopulation::new(x); plan.effort];
        let mut product = 1.0;
        let mut reached = Vec::with_capacity(plan.stages.len());
        for (k, &end) in plan.stages.iter().enumerate() {
            if product > 0.0 {
                let mut survivors = Vec::new();
                for (j, mut st) in states.into_iter().enumerate() {
                    let mut rng = rs.stream(k as u64 + 1, j as u64);
                    if st.advance(end, plan.chunk, &mut engine, law, &cfg, &mut rng)? {
                        survivors.push(st);
                    }
                }
                product *= survivors.len() as f64 / plan.effort as f64;
                states = if survivors.is_empty() {
                    Vec::new()
                } else {
                    resample(survivors, plan.effort, &mut rs.stream(0, k as u64))
                };
            }
            reached.push((end, product));
        }
        out.push(
            targets.iter().map(|&t| reached.iter().find(|(s, _)| (s - t).abs() < 1e-9).map_or(0.0, |r| r.1)).collect(),
        );
    }
    Ok(out)
}

/// Particles frozen at one time, highest first.
#[derive(Debug)]
struct Block {
    time: f64,
    positions: Vec<f64>,
}

/// A population as a stack of frozen blocks, each with a cursor to its next
/// unprocessed particle. Blocks are shared between resampled copies.
#[derive(Clone, Debug)]
struct LazyPopulation {
    blocks: Vec<(Arc<Block>, usize)>,
}

impl LazyPopulation {
    fn new(x: f64) -> Self {
        Self { blocks: vec![(Arc::new(Block { time: 0.0, positions: vec![x] }), 0)] }
    }

    /// Whether the population is alive at `end`. Takes the highest pending
    /// particle of the newest block, runs its subtree for at most `chunk`,
    /// and queues the survivors as a new block, until some subtree reaches
    /// `end` or nothing is left.
    fn advance<R: Rng + ?Sized>(
        &mut self,
        end: f64,
        chunk: f64,
        engine: &mut BbmEngine,
        law: &OffspringLaw,
        cfg: &BbmConfig,
        rng: &mut R,
    ) -> Result<bool, BbmError> {
        let mut run_cfg = cfg.clone();
        while let Some((block, next)) = self.blocks.last_mut() {
            if block.time >= end {
                return Ok(true);
            }
            let Some(&y) = block.positions.get(*next) else {
                self.blocks.pop();
                continue;
            };
            *next += 1;
            let from = block.time;
            let to = (from + chunk).min(end);
            run_cfg.horizon = to;
            let run = engine.run_population(&[y], from, law, &run_cfg, rng)?;
            if run.extinction_time.is_none() {
                let mut positions = run.final_positions;
                positions.sort_by(|a, b| b.total_cmp(a));
                self.blocks.push((Arc::new(Block { time: to, positions }), 0));
            }
        }
        Ok(false)
    }
}

/// Splitting estimate of `P_x(ζ > t + v t^{2/3} | ζ > t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingRatio {
    pub t: f64,
    pub v: f64,
    pub ratio: f64,
    pub std_err: f64,
    /// Repeats whose population died out before `t`; they carry no ratio.
    pub empty_repeats: usize,
}

/// Conditional survival for every pair `(t, v)` from one splitting run per
/// repeat: the ratio of the products at `t + v t^{2/3}` and at `t` is the
/// product of the stage fractions after `t`. Repeats are averaged and their
/// spread gives the error bar.
pub fn splitting_conditional_survival(
    x: f64,
    ts: &[f64],
    vs: &[f64],
    law: &OffspringLaw,
    plan: &SplittingPlan,
    streams: &Streams,
) -> Result<Vec<SplittingRatio>, BbmError> {
    if let Some(&v) = vs.iter().find(|&&v| !(v > 0.0)) {
        return Err(BbmError::Domain { what: "v", value: v });
    }
    let pairs: Vec<(f64, f64)> = ts.iter().flat_map(|&t| vs.iter().map(move |&v| (t, v))).collect();
    let mut targets: Vec<f64> = ts.to_vec();
    targets.extend(pairs.iter().map(|&(t, v)| t + v * t.powf(2.0 / 3.0)));
    let runs = survival_splitting_repeats(x, &targets, law, plan, streams)?;
    pairs
        .iter()
        .enumerate()
        .map(|(k, &(t, v))| {
            let base = ts.iter().position(|&s| s == t).expect("t is a target");
            let alive: Vec<f64> = runs.iter().filter(|r| r[base] > 0.0).map(|r| r[ts.len() + k] / r[base]).collect();
            if alive.len() < 2 {
                return Err(BbmError::InsufficientSample { needed: 2, got: alive.len() });
            }
            let a = MeanEstimate::from_iter(alive.iter().copied());
            Ok(SplittingRatio { t, v, ratio: a.mean(), std_err: a.std_err(), empty_repeats: runs.len() - alive.len() })
        })
        .collect()
}

fn resample<T: Clone, R: Rng + ?Sized>(survivors: Vec<T>, n: usize, rng: &mut R) -> Vec<T> {
    let s = survivors.len();
    let base = n / s;
    let extra = rand::seq::index::sample(rng, s, n - base * s);
    let mut copies = vec![base; s];
    for i in extra.iter() {
        copies[i] += 1;
    }
    let mut out = Vec::with_capacity(n);
    for (state, c) in survivors.into_iter().zip(copies) {
        for _ in 0..c {
            out.push(state.clone());
        }
    }
    out
}
