use super::label;
use crate::{Check, ExperimentConfig, LabError, Outcome, SampleGroup, Statement};
use excursion_ppp::{excursion_density, excursion_rate_below};
use mc_streams::Streams;
use std::f64::consts::{FRAC_PI_2, PI};
use taboo_diffusion::{ExcursionTracker, TabooConfig, TabooWalker};

const DEPTHS: [f64; 3] = [0.05, 0.1, 0.2];
const FD_STEP: f64 = 1e-6;

/// Closed forms of the excursion measure, then the intensity of simulated
/// excursion minima per unit local time.
pub(super) fn excursion_validate(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let s = Statement::ExcursionMeasure;

    // Centered differences on [0.01, 0.4]. The truncation error at d = 0.4 is
    // about 5e-9 in absolute terms, so the bound is applied relative to h(d).
    let mut worst_rel: f64 = 0.0;
    for i in 0..=390 {
        let d = 0.01 + 0.001 * i as f64;
        let fd = (excursion_rate_below(d + FD_STEP)? - excursion_rate_below(d - FD_STEP)?) / (2.0 * FD_STEP);
        let h = excursion_density(d)?;
        worst_rel = worst_rel.max((h - fd).abs() / h);
        if i % 10 == 0 {
            out.plot.push("density", d, h);
            out.plot.push("density:difference", d, fd);
        }
    }
    out.check(Check::below(s, "density-vs-difference-relative", worst_rel, 1e-9));
    let d = 0.1;
    let fd = (excursion_rate_below(d + FD_STEP)? - excursion_rate_below(d - FD_STEP)?) / (2.0 * FD_STEP);
    out.check(Check::below(s, "density-vs-difference-at-0.1", (excursion_density(d)? - fd).abs(), 1e-9));
    let limit = PI * PI / 2.0;
    out.check(Check::below(s, "density-limit-at-1e-5", (excursion_density(1e-5)? - limit).abs(), 1e-6));
    out.check(Check::below(
        s,
        "rate-over-depth-limit-at-1e-5",
        (excursion_rate_below(1e-5)? / 1e-5 - limit).abs(),
        1e-6,
    ));
    out.check(Check::within(s, "rate-at-quarter", excursion_rate_below(0.25)?, FRAC_PI_2, 1e-12));
    out.check(Check::within(s, "rate-at-sixth", excursion_rate_below(1.0 / 6.0)?, FRAC_PI_2 * (PI / 6.0).tan(), 1e-12));

    let run = TabooConfig { horizon: cfg.t(), bridge_low_below: Some(0.25), ..Default::default() };
    out.param("intensity_horizon", run.horizon);
    out.param("step", run.step);
    let mut rng = streams.stream(0, 0);
    let mut w = TabooWalker::new(&run)?;
    let mut tracker = ExcursionTracker::new(0.25);
    let mut buf = Vec::new();
    for _ in 0..run.steps() {
        w.advance(run.step, &mut rng, &mut buf);
        for sub in &buf {
            tracker.observe(sub);
        }
    }
    let local = w.local_time();
    out.param("local_time", local);
    let records = tracker.into_records();
    for &d in &DEPTHS {
        let count = records.iter().filter(|e| e.a < d).count() as f64;
        let expected = excursion_rate_below(d)? * local;
        out.check(Check::within(s, format!("intensity-ratio-d{}", label(d)), count / expected, 1.0, 0.05));
        out.check(Check::report(s, format!("intensity-poisson-sd-d{}", label(d)), expected.sqrt() / expected));
    }
    for k in 1..=24 {
        let d = 0.01 * k as f64;
        let count = records.iter().filter(|e| e.a < d).count() as f64;
        out.plot.push("intensity:empirical", d, count / local);
        out.plot.push("intensity:reference", d, excursion_rate_below(d)?);
    }
    let mut group = SampleGroup::new("excursions", &["u", "a", "s_start", "s_end"]);
    for e in &records {
        group.push(&[e.u, e.a, e.s_start, e.s_end]);
    }
    out.samples.push(group);
    out.check(Check::report(s, "clamp-events", w.clamp_events() as f64));
    Ok(out)
}
