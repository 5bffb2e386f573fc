use crate::{SpineConfig, SpineError, SpineSimulator, SubtreeMode, TimeGeometry};
use bbm_engine::{BbmConfig, BbmEngine, OffspringLaw};
use mc_streams::Streams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stat_lab::ks_two_sample;

/// Source of the compared samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arm {
    /// Engine runs kept only when alive at `t`.
    Conditioned,
    /// The branching process with spine, explicit subtrees.
    Spine,
}

impl Arm {
    fn domain(self) -> u64 {
        match self {
            Arm::Conditioned => 1,
            Arm::Spine => 2,
        }
    }
}

/// Population summary at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub population: f64,
    pub max_position: f64,
    pub z: f64,
}

impl Snapshot {
    const NAMES: [&'static str; 3] = ["population", "max_position", "z"];

    fn get(&self, i: usize) -> f64 {
        [self.population, self.max_position, self.z][i]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPlan {
    pub x: f64,
    pub t: f64,
    /// Fractions `δ`; snapshots are taken at `δt`.
    pub deltas: Vec<f64>,
    pub replicas: usize,
    /// Cap on conditioned attempts.
    pub max_attempts: u64,
    /// Engine grid step. Survival is exact at any step.
    pub dt: f64,
    pub clock_step: f64,
}

impl ComparisonPlan {
    pub fn new(x: f64, t: f64, replicas: usize) -> Self {
        Self { x, t, deltas: vec![0.01, 0.05], replicas, max_attempts: 200_000_000, dt: 0.05, clock_step: 1e-4 }
    }

    fn marks(&self) -> Vec<f64> {
        self.deltas.iter().map(|d| d * self.t).collect()
    }

    fn validate(&self) -> Result<(), SpineError> {
        if self.replicas == 0 || self.deltas.is_empty() {
            return Err(SpineError::InvalidConfig("need replicas and at least one delta".into()));
        }
        if self.deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
            return Err(SpineError::InvalidConfig("deltas must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Snapshots per replica, `stats[replica][delta index]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmDraws {
    pub arm: Arm,
    pub attempts: u64,
    pub stats: Vec<Vec<Snapshot>>,
}

const BATCH: u64 = 8192;

/// Draws `plan.replicas` snapshot vectors from one arm. Conditioned attempts
/// run in parallel batches and are accepted in index order, so the result
/// does not depend on the thread count.
pub fn sample_arm(
    arm: Arm,
    plan: &ComparisonPlan,
    law: &OffspringLaw,
    streams: &Streams,
) -> Result<ArmDraws, SpineError> {
    plan.validate()?;
    let marks = plan.marks();
    match arm {
        Arm::Conditioned => {
            let cfg = BbmConfig {
                horizon: plan.t,
                dt: plan.dt,
                checkpoints: marks.clone(),
                barrier_horizon: Some(plan.t),
                track_maximum: false,
                ..Default::default()
            };
            let mut stats = Vec::with_capacity(plan.replicas);
            let mut attempts = 0u64;
            while stats.len() < plan.replicas {
                if attempts >= plan.max_attempts {
                    return Err(SpineError::InsufficientSample { needed: plan.replicas, got: stats.len() });
                }
                let hi = (attempts + BATCH).min(plan.max_attempts);
                let batch: Vec<Option<Vec<Snapshot>>> = (attempts..hi)
                    .into_par_iter()
                    .map_init(BbmEngine::new, |engine, i| {
                        let mut rng = streams.stream(arm.domain(), i);
                        let run = engine.run(plan.x, law, &cfg, &mut rng)?;
                        if !run.survived_to(plan.t) {
                            return Ok(None);
                        }
                        Ok(Some(
                            marks
                                .iter()
                                .map(|&m| {
                                    let cp = run.checkpoint_at(m).expect("checkpoint on the grid");
                                    Snapshot {
                                        population: cp.population as f64,
                                        max_position: cp.max_position.unwrap_or(0.0),
                                        z: cp.z.unwrap_or(0.0),
                                    }
                                })
                                .collect(),
                        ))
                    })
                    .collect::<Result<_, SpineError>>()?;
                for (j, snap) in batch.into_iter().enumerate() {
                    if let Some(s) = snap {
                        stats.push(s);
                        if stats.len() == plan.replicas {
                            attempts += j as u64 + 1;
                            return Ok(ArmDraws { arm, attempts, stats });
                        }
                    }
                }
                attempts = hi;
            }
            Ok(ArmDraws { arm, attempts, stats })
        }
        Arm::Spine => {
            let geom = TimeGeometry::new(plan.t)?;
            let end = marks.iter().copied().fold(0.0, f64::max);
            let cfg = SpineConfig {
                end_time: Some(end),
                clock_step: plan.clock_step,
                checkpoints: marks.clone(),
                subtrees: SubtreeMode::Explicit,
                subtree_dt: plan.dt,
                record_samples: false,
                ..Default::default()
            };
            let sim = SpineSimulator::new(law.clone(), geom, cfg)?;
            let stats = (0..plan.replicas as u64)
                .into_par_iter()
                .map(|i| {
                    let run = sim.run(plan.x, &mut streams.stream(arm.domain(), i))?;
                    Ok(run
                        .checkpoints
                        .iter()
                        .map(|cp| Snapshot {
                            population: cp.population.unwrap_or(1) as f64,
                            max_position: cp.max_position.unwrap_or(cp.spine_position),
                            z: cp.z.unwrap_or(0.0),
                        })
                        .collect())
                })
                .collect::<Result<Vec<Vec<Snapshot>>, SpineError>>()?;
            Ok(ArmDraws { arm, attempts: plan.replicas as u64, stats })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub delta: f64,
    pub statistic: String,
    /// Two-sample Kolmogorov–Smirnov distance.
    pub ks: f64,
}

/// KS distances per `δ` and statistic.
pub fn compare_arms(a: &ArmDraws, b: &ArmDraws, deltas: &[f64]) -> Result<Vec<ComparisonRow>, SpineError> {
    let mut rows = Vec::new();
    for (k, &delta) in deltas.iter().enumerate() {
        for (i, name) in Snapshot::NAMES.iter().enumerate() {
            let xs: Vec<f64> = a.stats.iter().map(|s| s[k].get(i)).collect();
            let ys: Vec<f64> = b.stats.iter().map(|s| s[k].get(i)).collect();
            let ks = ks_two_sample(&xs, &ys, 1.0)
                .map_err(|e| SpineError::InvalidConfig(format!("comparison failed: {e}")))?
                .statistic;
            rows.push(ComparisonRow { delta, statistic: name.to_string(), ks });
        }
    }
    Ok(rows)
}

/// Distances between conditioned and spine populations at `δt`. These are
/// lower bounds on the total variation distance, not estimates of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub x: f64,
    pub t: f64,
    pub replicas: usize,
    pub conditioned_attempts: u64,
    pub acceptance_rate: f64,
    pub rows: Vec<ComparisonRow>,
    /// Per statistic: KS distances nondecreasing in `δ`.
    pub monotone_in_delta: Vec<(String, bool)>,
}

impl ComparisonReport {
    pub fn ks(&self, delta: f64, statistic: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.delta == delta && r.statistic == statistic).map(|r| r.ks)
    }
}

pub fn spine_comparison_diagnostic(
    plan: &ComparisonPlan,
    law: &OffspringLaw,
    streams: &Streams,
) -> Result<ComparisonReport, SpineError> {
    let conditioned = sample_arm(Arm::Conditioned, plan, law, streams)?;
    let spine = sample_arm(Arm::Spine, plan, law, streams)?;
    let rows = compare_arms(&conditioned, &spine, &plan.deltas)?;
    let mut order: Vec<f64> = plan.deltas.clone();
    order.sort_by(f64::total_cmp);
    let monotone_in_delta = Snapshot::NAMES
        .iter()
        .map(|name| {
            let series: Vec<f64> = order
                .iter()
                .filter_map(|&d| rows.iter().find(|r| r.delta == d && r.statistic == *name).map(|r| r.ks))
                .collect();
            (name.to_string(), series.windows(2).all(|w| w[0] <= w[1]))
        })
        .collect();
    Ok(ComparisonReport {
        x: plan.x,
        t: plan.t,
        replicas: plan.replicas,
        conditioned_attempts: conditioned.attempts,
        acceptance_rate: plan.replicas as f64 / conditioned.attempts as f64,
        rows,
        monotone_in_delta,
    })
}
