use super::label;
use crate::{Check, ExperimentConfig, LabError, Outcome, SampleGroup, Statement};
use bbm_engine::{
    barrier, critical_c, splitting_conditional_survival, survival_splitting_repeats, OffspringLaw, SplittingPlan,
};
use mc_streams::Streams;
use stat_lab::{survival_exponent_fit, MeanEstimate};
use std::f64::consts::PI;

const SURVIVAL_REPEATS: usize = 10;
const CONDITIONAL_REPEATS: usize = 12;
const VS: [f64; 3] = [0.5, 1.0, 2.0];
/// Survival is exact at any grid step; only the stage ends matter.
const DT: f64 = 1.0;

fn plan(targets: &[f64], effort: usize, repeats: usize) -> SplittingPlan {
    SplittingPlan::geometric(targets, 1.0, 1.25, effort, repeats, DT)
}

/// `P_x(ζ > t)` at `t_max/4, t_max/2, t_max` by splitting, and the slope of
/// `−log P` against `t^{1/3}`.
pub(super) fn bbm_survival(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let law = OffspringLaw::binary();
    let (x, t_max) = (cfg.x(), cfg.t());
    let ts = [t_max / 4.0, t_max / 2.0, t_max];
    out.param("x", x);
    out.param("t_max", t_max);
    out.param("repeats", SURVIVAL_REPEATS as f64);
    let runs = survival_splitting_repeats(x, &ts, &law, &plan(&ts, cfg.replicas, SURVIVAL_REPEATS), streams)?;
    let mut group = SampleGroup::new("repeats", &["t", "p"]);
    let mut points = Vec::new();
    for (k, &t) in ts.iter().enumerate() {
        let est = MeanEstimate::from_iter(runs.iter().map(|r| r[k]));
        for r in &runs {
            group.push(&[t, r[k]]);
        }
        let p = est.mean();
        out.check(Check::report(Statement::SurvivalAsymptotic, format!("p-t{}", label(t)), p));
        out.check(Check::report(Statement::SurvivalAsymptotic, format!("p-std-err-t{}", label(t)), est.std_err()));
        let l = barrier(t, 0.0);
        let envelope = l * (PI * x / l).sin() * (x - l).exp();
        out.check(Check::report(Statement::SurvivalBound, format!("p-over-envelope-t{}", label(t)), p / envelope));
        out.plot.push("minus-log-p", t.cbrt(), -p.ln());
        points.push((t, p, est.ci3()));
    }
    out.samples.push(group);
    if points.iter().any(|p| !(p.1 > 0.0)) {
        return Err(LabError::InsufficientSample("a survival estimate is zero; raise the effort".into()));
    }
    let fit = survival_exponent_fit(&points)?;
    let c = critical_c();
    out.check(Check::within(Statement::SurvivalAsymptotic, "exponent-slope", fit.slope, c, 0.1 * c));
    out.check(Check::report(Statement::SurvivalAsymptotic, "exponent-fit-r2", fit.r2));
    for &(t, _, _) in &points {
        out.plot.push("minus-log-p:fit", t.cbrt(), fit.slope * t.cbrt() + fit.intercept);
    }
    Ok(out)
}

/// `P_x(ζ > t + v t^{2/3} | ζ > t)` for `t ∈ {t₀/2, t₀, 2t₀}` and
/// `v ∈ {0.5, 1, 2}`, against the limit `e^{−cv/3}`.
pub(super) fn conditional(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let s = Statement::ConditionalSurvival;
    let law = OffspringLaw::binary();
    let (x, t0) = (cfg.x(), cfg.t());
    let ts = [t0 / 2.0, t0, 2.0 * t0];
    out.param("x", x);
    out.param("t", t0);
    out.param("repeats", CONDITIONAL_REPEATS as f64);
    let mut targets: Vec<f64> = ts.to_vec();
    for &t in &ts {
        targets.extend(VS.iter().map(|v| t + v * t.powf(2.0 / 3.0)));
    }
    let ratios =
        splitting_conditional_survival(x, &ts, &VS, &law, &plan(&targets, cfg.replicas, CONDITIONAL_REPEATS), streams)?;
    let c = critical_c();
    let limit = |v: f64| (-c * v / 3.0).exp();
    let at = |t: f64, v: f64| ratios.iter().find(|r| r.t == t && r.v == v).expect("every pair is estimated");
    let centre = at(t0, 1.0);
    out.check(Check::within(s, format!("conditional-t{}-v1", label(t0)), centre.ratio, limit(1.0), 0.05));
    // Distances to the limit may not grow beyond joint 3σ noise along t.
    let series: Vec<_> = ts.iter().map(|&t| at(t, 1.0)).collect();
    let approach = series.windows(2).all(|w| {
        let slack = 3.0 * (w[0].std_err.powi(2) + w[1].std_err.powi(2)).sqrt();
        (w[1].ratio - limit(1.0)).abs() <= (w[0].ratio - limit(1.0)).abs() + slack
    });
    out.check(Check::holds(s, "approach-to-limit-along-t", approach));
    let nested = ts.iter().all(|&t| VS.windows(2).all(|w| at(t, w[0]).ratio >= at(t, w[1]).ratio));
    out.check(Check::holds(s, "decreasing-in-v", nested));
    let mut group = SampleGroup::new("estimates", &["t", "v", "ratio", "std_err", "limit"]);
    for r in &ratios {
        group.push(&[r.t, r.v, r.ratio, r.std_err, limit(r.v)]);
        if !(r.t == t0 && r.v == 1.0) {
            out.check(Check::report(s, format!("conditional-t{}-v{}", label(r.t), label(r.v)), r.ratio));
        }
        out.plot.push(&format!("conditional-v{}", label(r.v)), r.t, r.ratio);
        out.plot.push(&format!("conditional-v{}:limit", label(r.v)), r.t, limit(r.v));
    }
    out.samples.push(group);
    Ok(out)
}
