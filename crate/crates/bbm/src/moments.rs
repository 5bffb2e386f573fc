use crate::{BbmConfig, BbmEngine, BbmError, OffspringLaw};
use mc_streams::Streams;
use serde::{Deserialize, Serialize};
use stat_lab::MeanEstimate;
use statrs::function::erf::erf;

/// `E_x[Σ_u e^{X_u(s)}] = e^x P_x(driftless BM stays positive up to s)`.
pub fn many_to_one_closed_form(x: f64, s: f64) -> f64 {
    x.exp() * erf(x / (2.0 * s).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManyToOne {
    pub mc_estimate: f64,
    pub closed_form: f64,
    /// 3σ half-width of the Monte Carlo mean.
    pub ci: f64,
    pub replicas: usize,
}

/// Monte Carlo mean of `Σ e^{X_u(s)}` against its closed form. Replica `i`
/// uses substream `i` of `streams`.
pub fn many_to_one_check(
    x: f64,
    s: f64,
    law: &OffspringLaw,
    replicas: usize,
    dt: f64,
    streams: &Streams,
) -> Result<ManyToOne, BbmError> {
    if !(x > 0.0) {
        return Err(BbmError::Domain { what: "x", value: x });
    }
    if !(s > 0.0) {
        return Err(BbmError::Domain { what: "s", value: s });
    }
    let cfg = BbmConfig { horizon: s, dt, checkpoints: vec![s], track_maximum: false, ..Default::default() };
    let mut engine = BbmEngine::new();
    let mut acc = MeanEstimate::new();
    for i in 0..replicas {
        let r = engine.run(x, law, &cfg, &mut streams.stream(0, i as u64))?;
        acc.push(r.checkpoints[0].sum_exp);
    }
    Ok(ManyToOne { mc_estimate: acc.mean(), closed_form: many_to_one_closed_form(x, s), ci: acc.ci3(), replicas })
}
