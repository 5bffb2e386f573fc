use super::{label, par_map_init};
use crate::{Check, ExperimentConfig, LabError, Outcome, SampleGroup, Statement};
use bbm_engine::{many_to_one_closed_form, BbmConfig, BbmEngine, OffspringLaw};
use mc_streams::Streams;
use stat_lab::MeanEstimate;

const V_TIMES: [f64; 3] = [0.5, 1.0, 2.0];
const LEVELS: [f64; 3] = [1.0, 2.0, 3.0];
/// Horizon of the barrier used for `Z` and `Z′`.
const BARRIER_T: f64 = 10.0;
/// Runs still alive and below the top level at this time are censored.
const TAIL_HORIZON: f64 = 1e3;

/// `E[V(s)] = x e^x`, `P(sup M ≥ x + a) ≤ e^{−a}`, and `Z′ ≤ Z` on every
/// recorded configuration.
pub(super) fn martingale_check(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let law = OffspringLaw::binary();
    let x = cfg.x();
    out.param("x", x);
    out.param("barrier_t", BARRIER_T);
    let fixed = BbmConfig {
        horizon: *V_TIMES.last().expect("nonempty"),
        dt: 0.01,
        checkpoints: V_TIMES.to_vec(),
        barrier_horizon: Some(BARRIER_T),
        track_maximum: false,
        ..Default::default()
    };
    let runs = par_map_init(cfg.replicas, BbmEngine::new, |engine, i| {
        let r = engine.run(x, &law, &fixed, &mut streams.stream(0, i))?;
        let mut v = [0.0; V_TIMES.len()];
        let mut dominated = true;
        for (k, &s) in V_TIMES.iter().enumerate() {
            let cp = r.checkpoint_at(s).expect("checkpoint on the grid");
            v[k] = cp.v;
            if let (Some(z), Some(zp)) = (cp.z, cp.z_prime) {
                dominated &= zp <= z * (1.0 + 1e-12);
            }
        }
        Ok((v, dominated))
    })?;
    let start = x * x.exp();
    let mut group = SampleGroup::new("martingale", &["s", "v"]);
    for (k, &s) in V_TIMES.iter().enumerate() {
        let est = MeanEstimate::from_iter(runs.iter().map(|r| r.0[k]));
        out.check(Check::within(
            Statement::MartingaleBound,
            format!("mean-v-s{}", label(s)),
            est.mean(),
            start,
            est.ci3(),
        ));
        out.plot.push("mean-v", s, est.mean());
        out.plot.push("mean-v:target", s, start);
        for r in &runs {
            group.push(&[s, r.0[k]]);
        }
    }
    out.samples.push(group);
    out.check(Check::holds(Statement::BarrierFunctionals, "z-prime-at-most-z", runs.iter().all(|r| r.1)));

    let top = x + LEVELS.iter().copied().fold(0.0, f64::max);
    let tail = BbmConfig { horizon: TAIL_HORIZON, dt: 0.01, stop_above: Some(top), ..Default::default() };
    let maxima = par_map_init(cfg.replicas, BbmEngine::new, |engine, i| {
        let r = engine.run(x, &law, &tail, &mut streams.stream(1, i))?;
        let censored = r.extinction_time.is_none() && !r.stopped_above;
        Ok((r.all_time_max, censored))
    })?;
    let n = maxima.len() as f64;
    let censored = maxima.iter().filter(|m| m.1).count();
    for &a in &LEVELS {
        let p = maxima.iter().filter(|m| m.0 >= x + a).count() as f64 / n;
        let sd = (p * (1.0 - p) / n).sqrt();
        out.check(Check::at_most(Statement::MartingaleBound, format!("tail-a{}", label(a)), p, (-a).exp(), 3.0 * sd));
        let sharp = start / ((x + a) * (x + a).exp());
        out.check(Check::report(Statement::MartingaleBound, format!("optional-stopping-bound-a{}", label(a)), sharp));
        out.plot.push("tail", a, p);
        out.plot.push("tail:bound", a, (-a).exp());
    }
    out.check(Check::report(Statement::MartingaleBound, "censored-runs", censored as f64));
    let mut group = SampleGroup::new("all-time-max", &["max", "censored"]);
    for m in &maxima {
        group.push(&[m.0, if m.1 { 1.0 } else { 0.0 }]);
    }
    out.samples.push(group);
    Ok(out)
}

/// Monte Carlo `E_x[Σ e^{X_u(s)}]` against `e^x (2Φ(x/√s) − 1)`.
pub(super) fn many_to_one(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let law = OffspringLaw::binary();
    let (x, s) = (cfg.x(), cfg.t());
    out.param("x", x);
    out.param("s", s);
    let run = BbmConfig { horizon: s, dt: 0.01, checkpoints: vec![s], track_maximum: false, ..Default::default() };
    let rows = par_map_init(cfg.replicas, BbmEngine::new, |engine, i| {
        let r = engine.run(x, &law, &run, &mut streams.stream(0, i))?;
        let cp = r.checkpoint_at(s).expect("checkpoint at the horizon");
        Ok([cp.sum_exp, cp.population as f64])
    })?;
    let est = MeanEstimate::from_iter(rows.iter().map(|r| r[0]));
    let exact = many_to_one_closed_form(x, s);
    out.check(Check::within(Statement::ManyToOne, "mean-within-3-sigma", est.mean(), exact, est.ci3()));
    out.check(Check::report(Statement::ManyToOne, "relative-error", est.mean() / exact - 1.0));
    let mut acc = MeanEstimate::new();
    for (i, r) in rows.iter().enumerate() {
        acc.push(r[0]);
        let n = i + 1;
        if n.is_power_of_two() || n == rows.len() {
            out.plot.push("running-mean", n as f64, acc.mean());
            out.plot.push("running-mean:target", n as f64, exact);
        }
    }
    let mut group = SampleGroup::new("runs", &["sum_exp", "population"]);
    for r in &rows {
        group.push(r);
    }
    out.samples.push(group);
    Ok(out)
}
