use super::{label, par_map};
use crate::{Check, ExperimentConfig, LabError, Outcome, SampleGroup, Statement};
use excursion_ppp::{simulate_drifted_min, DriftedMinProblem};
use mc_streams::Streams;
use stat_lab::{ks_test, ReferenceLaw};
use taboo_diffusion::{TabooConfig, TabooScheme};

const THETA: f64 = 0.5;
const ETAS: [f64; 6] = [0.02, 0.05, 0.1, 0.2, 0.5, 1.0];

/// Minimum of `K_s + γs` along taboo paths for `γ ∈ {100γ₀, 10γ₀, γ₀}`:
/// `M/√γ` against `R̃` and `√γ·m/(M/√γ)` against `U`.
pub(super) fn drifted_minimum(cfg: &ExperimentConfig, streams: &Streams) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.experiment, cfg.seed);
    let s = Statement::DriftedTabooMinimum;
    let smallest = cfg.gamma();
    let gammas = [100.0 * smallest, 10.0 * smallest, smallest].map(|g: f64| g.min(0.2));
    let walker = TabooConfig {
        step: 1e-3,
        horizon: 1e12,
        bridge_low_below: Some(0.5),
        scheme: TabooScheme::BesselSplit,
        ..Default::default()
    };
    out.param("gamma", smallest);
    out.param("theta", THETA);
    out.param("step", walker.step);
    let mut group = SampleGroup::new("minima", &["gamma", "min_scaled", "argmin_scaled", "second_gap_scaled"]);
    let mut ks_min = Vec::new();
    let mut clamps = 0;
    for (k, &gamma) in gammas.iter().enumerate() {
        let problem = DriftedMinProblem::standard(gamma, 10.0 / gamma, THETA)?;
        let rows = par_map(cfg.replicas, |i| {
            let o = simulate_drifted_min(&problem, &walker, &mut streams.stream(k as u64, i))?;
            let r = o.result;
            let sg = gamma.sqrt();
            Ok(([r.min_value / sg, sg * r.argmin, (r.second_min - r.min_value) / sg], o.clamp_events))
        })?;
        clamps += rows.iter().map(|r| r.1).sum::<u64>();
        let m: Vec<f64> = rows.iter().map(|r| r.0[0]).collect();
        let ratio: Vec<f64> = rows.iter().map(|r| r.0[1] / r.0[0]).collect();
        let d_min = ks_test(&m, &ReferenceLaw::RayleighRtilde, 0.05)?.statistic;
        let d_ratio = ks_test(&ratio, &ReferenceLaw::UniformU, 0.05)?.statistic;
        ks_min.push(d_min);
        let g = label(gamma);
        if k + 1 == gammas.len() {
            out.check(Check::below(s, "ks-minimum", d_min, 0.05));
            out.check(Check::below(s, "ks-position-ratio", d_ratio, 0.05));
            let gaps: Vec<f64> = rows.iter().map(|r| r.0[2]).collect();
            let curve: Vec<f64> =
                ETAS.iter().map(|&eta| gaps.iter().filter(|&&x| x <= eta).count() as f64 / gaps.len() as f64).collect();
            for (&eta, &p) in ETAS.iter().zip(&curve) {
                out.check(Check::report(s, format!("second-gap-below-eta{}", label(eta)), p));
                out.plot.push("second-gap-curve", eta, p);
            }
            out.plot.ecdf_pair("minimum", &m, |r| ReferenceLaw::RayleighRtilde.cdf(r), 99);
            out.plot.ecdf_pair("position-ratio", &ratio, |u| u.clamp(0.0, 1.0), 99);
        } else {
            out.check(Check::report(s, format!("ks-minimum-gamma{g}"), d_min));
            out.check(Check::report(s, format!("ks-position-ratio-gamma{g}"), d_ratio));
        }
        out.plot.push("ks-minimum", gamma, d_min);
        out.plot.push("ks-position-ratio", gamma, d_ratio);
        for r in &rows {
            group.push(&[gamma, r.0[0], r.0[1], r.0[2]]);
        }
    }
    out.check(Check::holds(s, "ks-minimum-decreasing-in-gamma", ks_min.windows(2).all(|w| w[1] < w[0])));
    out.check(Check::report(s, "clamp-events", clamps as f64));
    out.samples.push(group);
    Ok(out)
}
