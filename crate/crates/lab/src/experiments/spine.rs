use super::{label, median, par_map};
use crate::{Check, ExperimentConfig, LabError, Outcome, SampleGroup, Statement};
use bbm_engine::OffspringLaw;
use mc_streams::Streams;
use spine_bbm::{
    compare_arms, sample_arm, spine_vs_population_gap, Arm, ComparisonPlan, SpineConfig, SpineSimulator, SubtreeMode,
    TimeGeometry,
};
use stat_lab::{joint_rur_test, ks_test, JointThresholds, ReferenceLaw};
use std::f64::consts::PI;

/// Explicit subtrees are affordable up to this barrier height.
const EXPLICIT_UP_TO: f64 = 12.0;
const KS_THRESHOLD: f64 = 0.1;
const PROXIMITY_THRESHOLD: f64 = 0.05;

fn simulator(geom: TimeGeometry) -> Result<SpineSimulator, LabError> {
    let subtrees = if geom.l0() <= EXPLICIT_UP_TO { SubtreeMode::Explicit } else { SubtreeMode::Tabulated };
    let cfg = SpineConfig { subtrees, record_samples: false, ..Default::default() };
    Ok(SpineSimulator::new(OffspringLaw::binary(), geom, cfg)?)
}

fn start(cfg: &ExperimentConfig, geom: &TimeGeometry) -> f64 {
    cfg.x.unwrap_or(geom.l0() / 2.0)
}

/// Rescaled height and time of the maximum against `(c^{1/2}R, 3c^{−1/2}UR)`,
/// plus the barrier and clock identities.
pub(super) fn spine_maximum(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let geom = TimeGeometry::new(cfg.t())?;
    geometry_checks(&mut out, &geom)?;
    let x = start(cfg, &geom);
    out.param("t", geom.horizon);
    out.param("x", x);
    out.param("l0", geom.l0());
    let sim = simulator(geom)?;
    let rows = par_map(cfg.replicas, |i| {
        let run = sim.run(x, &mut streams.stream(0, i))?;
        Ok((run.rescaled(&geom), run.regime_warning, run.clamp_events))
    })?;
    let s = Statement::MaximumLimitLaw;
    let c = geom.c_const;
    let height_law = ReferenceLaw::RayleighR.scaled(c.sqrt());
    let time_law = ReferenceLaw::UniformTimesR.scaled(3.0 / c.sqrt());
    let heights: Vec<f64> = rows.iter().map(|r| r.0.height).collect();
    let times: Vec<f64> = rows.iter().map(|r| r.0.time).collect();
    out.check(Check::below(s, "ks-height", ks_test(&heights, &height_law, KS_THRESHOLD)?.statistic, KS_THRESHOLD));
    out.check(Check::below(s, "ks-argmax-time", ks_test(&times, &time_law, KS_THRESHOLD)?.statistic, KS_THRESHOLD));
    let spine_h: Vec<f64> = rows.iter().map(|r| r.0.spine_height).collect();
    let spine_t: Vec<f64> = rows.iter().map(|r| r.0.spine_time).collect();
    out.check(Check::report(s, "ks-spine-height", ks_test(&spine_h, &height_law, KS_THRESHOLD)?.statistic));
    out.check(Check::report(s, "ks-spine-argmax-time", ks_test(&spine_t, &time_law, KS_THRESHOLD)?.statistic));
    // The ratio test needs positive heights; runs that overshoot L_t are dropped.
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.0.height, r.0.time)).filter(|p| p.0 > 0.0).collect();
    let thresholds = JointThresholds {
        marginal_ks: KS_THRESHOLD,
        ratio_ks: KS_THRESHOLD,
        max_abs_correlation: 0.1,
        min_quadrant_p: 0.01,
    };
    let joint = joint_rur_test(&pairs, &height_law, 3.0 / c, thresholds)?;
    out.check(Check::report(s, "ks-time-over-height-ratio", joint.ratio.statistic));
    out.check(Check::report(s, "height-ratio-correlation", joint.correlation));
    out.check(Check::report(s, "overshoots-dropped", (rows.len() - pairs.len()) as f64));
    out.check(Check::report(s, "regime-warnings", rows.iter().filter(|r| r.1).count() as f64));
    out.check(Check::report(s, "clamp-events", rows.iter().map(|r| r.2).sum::<u64>() as f64));
    out.plot.ecdf_pair("height", &heights, |v| height_law.cdf(v), 99);
    out.plot.ecdf_pair("argmax-time", &times, |v| time_law.cdf(v), 99);
    let mut group = SampleGroup::new("maxima", &["height", "time", "spine_height", "spine_time"]);
    for r in &rows {
        group.push(&[r.0.height, r.0.time, r.0.spine_height, r.0.spine_time]);
    }
    out.samples.push(group);
    Ok(out)
}

fn geometry_checks(out: &mut Outcome, geom: &TimeGeometry) -> Result<(), LabError> {
    let s = Statement::TimeGeometry;
    let l0 = geom.l0();
    let early = 1e3_f64.min(geom.horizon / 1e3);
    out.check(Check::within(s, "tau-over-linear-clock", geom.tau(early)? / (early / (l0 * l0)), 1.0, 0.01));
    let drop = l0 - geom.l(geom.tau_inv(1.0)?)?;
    out.check(Check::within(s, "barrier-drop-over-unit-clock", drop / (PI * PI / 2.0), 1.0, 0.01));
    let mut worst: f64 = 0.0;
    for k in 1..100 {
        let s = geom.horizon * k as f64 / 100.0;
        worst = worst.max((geom.tau_inv(geom.tau(s)?)? - s).abs() / s);
    }
    out.check(Check::below(s, "clock-round-trip", worst, 1e-10));
    out.check(Check::within(s, "gamma-times-barrier", geom.gamma() * l0, PI * PI / 2.0, 1e-12));
    Ok(())
}

/// Gaps between the population and spine maxima along `t/100, t/10, t`.
pub(super) fn spine_gap(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let s = Statement::SpineConstruction;
    let top = cfg.t();
    let ts = [top / 100.0, top / 10.0, top];
    out.param("t", top);
    let mut group = SampleGroup::new("gaps", &["t", "height_gap", "argmax_gap"]);
    let (mut height_medians, mut time_medians) = (Vec::new(), Vec::new());
    let mut dominated = true;
    for (k, &t) in ts.iter().enumerate() {
        let geom = TimeGeometry::new(t)?;
        let sim = simulator(geom)?;
        let x = start(cfg, &geom);
        let gaps = par_map(cfg.replicas, |i| {
            let run = sim.run(x, &mut streams.stream(k as u64, i))?;
            Ok(spine_vs_population_gap(&run))
        })?;
        dominated &= gaps.iter().all(|g| g.0 >= 0.0);
        let h: Vec<f64> = gaps.iter().map(|g| g.0 / geom.height_scale()).collect();
        let w: Vec<f64> = gaps.iter().map(|g| g.1 / geom.time_scale()).collect();
        for (a, b) in h.iter().zip(&w) {
            group.push(&[t, *a, *b]);
        }
        let (mh, mw) = (median(&h), median(&w));
        out.check(Check::report(s, format!("median-height-gap-t{}", label(t)), mh));
        out.check(Check::report(s, format!("median-argmax-gap-t{}", label(t)), mw));
        out.plot.push("median-height-gap", t, mh);
        out.plot.push("median-argmax-gap", t, mw);
        height_medians.push(mh);
        time_medians.push(mw);
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    out.check(Check::holds(s, "height-gap-decreasing", decreasing(&height_medians)));
    out.check(Check::holds(s, "argmax-gap-decreasing", decreasing(&time_medians)));
    out.check(Check::holds(s, "population-dominates-spine", dominated));
    out.samples.push(group);
    Ok(out)
}

/// Conditioned process against the spine construction at `δt`, by
/// two-sample KS on population size, maximum position and `Z`.
pub(super) fn spine_proximity(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let s = Statement::SpineProximity;
    let (x, t) = (cfg.x(), cfg.t());
    let plan = ComparisonPlan::new(x, t, cfg.replicas);
    out.param("x", x);
    out.param("t", t);
    let law = OffspringLaw::binary();
    let conditioned = sample_arm(Arm::Conditioned, &plan, &law, streams)?;
    let spine = sample_arm(Arm::Spine, &plan, &law, streams)?;
    let rows = compare_arms(&conditioned, &spine, &plan.deltas)?;
    let ks = |delta: f64, stat: &str| {
        rows.iter().find(|r| r.delta == delta && r.statistic == stat).map(|r| r.ks).expect("row present")
    };
    for r in &rows {
        let name = format!("ks-{}-delta{}", r.statistic.replace('_', "-"), label(r.delta));
        if r.delta == 0.05 && r.statistic == "max_position" {
            out.check(Check::below(s, name, r.ks, PROXIMITY_THRESHOLD));
        } else {
            out.check(Check::report(s, name, r.ks));
        }
        out.plot.push(&format!("ks-{}", r.statistic.replace('_', "-")), r.delta, r.ks);
    }
    out.check(Check::holds(s, "max-position-delta-trend", ks(0.01, "max_position") <= ks(0.05, "max_position")));
    // Asymptotic 95% point of the two-sample KS distance between equal laws.
    let n = plan.replicas as f64;
    out.check(Check::report(s, "ks-noise-floor-95", 1.358 * (2.0 / n).sqrt()));
    out.check(Check::report(s, "acceptance-rate", plan.replicas as f64 / conditioned.attempts as f64));
    let mut group = SampleGroup::new("snapshots", &["arm", "delta", "population", "max_position", "z"]);
    for (code, draws) in [(0.0, &conditioned), (1.0, &spine)] {
        for stats in &draws.stats {
            for (snap, &delta) in stats.iter().zip(&plan.deltas) {
                group.push(&[code, delta, snap.population, snap.max_position, snap.z]);
            }
        }
    }
    out.samples.push(group);
    Ok(out)
}
