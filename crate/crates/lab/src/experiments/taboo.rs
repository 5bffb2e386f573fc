use super::{label, par_map};
use crate::{Check, ExperimentConfig, LabError, Outcome, SampleGroup, Statement};
use mc_streams::Streams;
use stat_lab::{ks_statistic, ks_two_sample};
use taboo_diffusion::{stationary_cdf, Occupation, TabooConfig, TabooWalker, TransitionSampler};

const MARKS: [f64; 2] = [0.1, 1.0];
const LOCAL_TIME_STARTS: [f64; 3] = [0.1, 0.5, 0.9];
const LOCAL_TIME_HORIZON: f64 = 1e3;

/// Euler marginals against the spectral sampler, the occupation law over a
/// long run, and the local time rate from three starts.
pub(super) fn taboo_validate(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let x = cfg.x();
    let euler = TabooConfig { start: x, ..Default::default() };
    euler.validate()?;
    out.param("x", x);
    out.param("step", euler.step);
    out.param("occupation_horizon", cfg.t());

    let steps: Vec<usize> = MARKS.iter().map(|u| (u / euler.step).round() as usize).collect();
    let paths = par_map(cfg.replicas, |i| {
        let mut rng = streams.stream(0, i);
        let mut w = TabooWalker::new(&euler)?;
        let mut buf = Vec::new();
        let mut at = [0.0; MARKS.len()];
        let mut done = 0;
        for (k, &n) in steps.iter().enumerate() {
            while done < n {
                w.advance(euler.step, &mut rng, &mut buf);
                done += 1;
            }
            at[k] = w.value();
        }
        Ok((at, w.clamp_events()))
    })?;
    let clamps: u64 = paths.iter().map(|p| p.1).sum();
    let mut group = SampleGroup::new("marginals", &["u", "euler", "exact"]);
    for (k, &u) in MARKS.iter().enumerate() {
        let sampler = TransitionSampler::new(x, u)?;
        let mut rng = streams.stream(1, k as u64);
        let exact: Vec<f64> = (0..cfg.replicas).map(|_| sampler.sample(&mut rng)).collect();
        let sim: Vec<f64> = paths.iter().map(|p| p.0[k]).collect();
        for (a, b) in sim.iter().zip(&exact) {
            group.push(&[u, *a, *b]);
        }
        let d = ks_two_sample(&sim, &exact, 0.015)?.statistic;
        out.check(Check::below(Statement::TabooProcess, format!("euler-vs-exact-u{}", label(u)), d, 0.015));
        let one = ks_statistic(&sim, |y| sampler.cdf(y))?;
        out.check(Check::report(Statement::TabooProcess, format!("euler-vs-series-cdf-u{}", label(u)), one));
        out.plot.ecdf_pair(&format!("marginal-u{}", label(u)), &sim, |y| sampler.cdf(y), 99);
    }
    out.samples.push(group);

    let long = TabooConfig { start: 0.5, horizon: cfg.t(), ..Default::default() };
    let mut rng = streams.stream(2, 0);
    let mut w = TabooWalker::new(&long)?;
    let mut occ = Occupation::new(1000);
    let mut buf = Vec::new();
    for _ in 0..long.steps() {
        occ.record(w.value(), long.step);
        w.advance(long.step, &mut rng, &mut buf);
    }
    out.check(Check::below(Statement::TabooProcess, "occupation-sup-error", occ.sup_error(), 0.01));
    for (y, f) in occ.cumulative().into_iter().step_by(10) {
        out.plot.push("occupation:empirical", y, f);
        out.plot.push("occupation:reference", y, stationary_cdf(y));
    }

    let rates = par_map(LOCAL_TIME_STARTS.len(), |j| {
        let c = TabooConfig { start: LOCAL_TIME_STARTS[j as usize], horizon: LOCAL_TIME_HORIZON, ..Default::default() };
        let mut rng = streams.stream(3, j);
        let mut w = TabooWalker::new(&c)?;
        let mut buf = Vec::new();
        for _ in 0..c.steps() {
            w.advance(c.step, &mut rng, &mut buf);
        }
        Ok((w.local_time(), w.time(), w.clamp_events()))
    })?;
    let mut lt = SampleGroup::new("local-time", &["start", "s", "local_time"]);
    for (&start, &(l, s, c)) in LOCAL_TIME_STARTS.iter().zip(&rates) {
        lt.push(&[start, s, l]);
        out.check(Check::within(
            Statement::LocalTimeRate,
            format!("local-time-rate-x{}", label(start)),
            l / s,
            2.0,
            0.05,
        ));
        out.plot.push("local-time-rate", start, l / s);
        if c > 0 {
            out.note(format!("{c} clamp events in the local time run from {start}"));
        }
    }
    out.samples.push(lt);
    out.check(Check::report(Statement::TabooProcess, "clamp-events", (clamps + w.clamp_events()) as f64));
    Ok(out)
}
