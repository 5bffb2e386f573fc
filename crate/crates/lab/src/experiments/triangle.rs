use super::{label, par_map};
use crate::{Check, ExperimentConfig, LabError, Outcome, SampleGroup, Statement};
use excursion_ppp::sample_triangle_model;
use mc_streams::Streams;
use stat_lab::{ks_test, pearson, ReferenceLaw};
use std::f64::consts::PI;

const CHUNK: usize = 4096;

/// Exact draws of `(M₀, v₀*, M₀*)` at rate `π²/2` against `(R̃, 2UR̃)`.
pub(super) fn triangle_model(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let s = Statement::PoissonMinimum;
    let rate = PI * PI / 2.0;
    out.param("rate", rate);
    let n = cfg.replicas;
    let chunks = par_map(n.div_ceil(CHUNK), |c| {
        let mut rng = streams.stream(0, c);
        let len = CHUNK.min(n - c as usize * CHUNK);
        Ok((0..len).map(|_| sample_triangle_model(rate, &mut rng)).collect::<Vec<_>>())
    })?;
    let draws: Vec<_> = chunks.into_iter().flatten().collect();
    let m: Vec<f64> = draws.iter().map(|d| d.min_value).collect();
    let ratio: Vec<f64> = draws.iter().map(|d| d.argmin / (2.0 * d.min_value)).collect();

    out.check(Check::below(s, "ks-minimum", ks_test(&m, &ReferenceLaw::RayleighRtilde, 0.01)?.statistic, 0.01));
    out.check(Check::below(s, "ks-position-ratio", ks_test(&ratio, &ReferenceLaw::UniformU, 0.01)?.statistic, 0.01));
    out.check(Check::below(s, "abs-correlation", pearson(&m, &ratio)?.abs(), 0.01));
    out.check(Check::holds(s, "second-minimum-above-minimum", draws.iter().all(|d| d.second_min > d.min_value)));
    let median = ReferenceLaw::RayleighRtilde.median();
    let above = m.iter().filter(|&&v| v > median).count() as f64 / n as f64;
    out.check(Check::within(s, "tail-at-median", above, 0.5, 0.0025));
    for t in [0.2, 0.4, 0.6] {
        let exact = (-rate * t * t).exp();
        let p = m.iter().filter(|&&v| v > t).count() as f64 / n as f64;
        let sd = (exact * (1.0 - exact) / n as f64).sqrt();
        out.check(Check::within(s, format!("tail-at-{}", label(t)), p, exact, 3.0 * sd));
    }

    out.plot.ecdf_pair("minimum", &m, |r| ReferenceLaw::RayleighRtilde.cdf(r), 99);
    out.plot.ecdf_pair("position-ratio", &ratio, |u| u.clamp(0.0, 1.0), 99);
    let mut group = SampleGroup::new("draws", &["min", "argmin", "second_min"]);
    for d in &draws {
        group.push(&[d.min_value, d.argmin, d.second_min]);
    }
    out.samples.push(group);
    Ok(out)
}
