//! One module per family of experiments. Every experiment derives its
//! streams from `(seed, experiment name)` and collects parallel results in
//! index order, so outputs do not depend on the thread count.

mod bbm;
mod drifted;
mod excursion;
mod spine;
mod survival;
mod taboo;
mod triangle;

use crate::{Experiment, ExperimentConfig, LabError, Outcome};
use mc_streams::{domain_tag, Streams};
use rayon::prelude::*;

/// Runs the configured experiment and applies threshold overrides.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    cfg.validate()?;
    let streams = Streams::new(cfg.seed).child(domain_tag(cfg.experiment.name()));
    let mut out = match cfg.experiment {
        Experiment::TabooValidate => taboo::taboo_validate(cfg, &streams),
        Experiment::ExcursionValidate => excursion::excursion_validate(cfg, &streams),
        Experiment::TriangleModel => triangle::triangle_model(cfg, &streams),
        Experiment::DriftedMinimum => drifted::drifted_minimum(cfg, &streams),
        Experiment::BbmSurvival => survival::bbm_survival(cfg, &streams),
        Experiment::ConditionalSurvival => survival::conditional(cfg, &streams),
        Experiment::MartingaleCheck => bbm::martingale_check(cfg, &streams),
        Experiment::ManyToOne => bbm::many_to_one(cfg, &streams),
        Experiment::SpineMaximum => spine::spine_maximum(cfg, &streams),
        Experiment::SpineGap => spine::spine_gap(cfg, &streams),
        Experiment::SpineProximity => spine::spine_proximity(cfg, &streams),
    }?;
    out.param("replicas", cfg.replicas as f64);
    out.apply_thresholds(&cfg.thresholds).map_err(LabError::Config)?;
    Ok(out)
}

/// `f(0), …, f(n−1)` in parallel, in index order.
fn par_map<T, F>(n: usize, f: F) -> Result<Vec<T>, LabError>
where
    T: Send,
    F: Fn(u64) -> Result<T, LabError> + Sync + Send,
{
    (0..n as u64).into_par_iter().map(f).collect()
}

/// As [`par_map`], with per-worker scratch state.
fn par_map_init<S, T, I, F>(n: usize, init: I, f: F) -> Result<Vec<T>, LabError>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64) -> Result<T, LabError> + Sync + Send,
{
    (0..n as u64).into_par_iter().map_init(init, f).collect()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Label for a number inside a check name: `0.1`, `1`, `1e-4`.
fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e5) {
        let e = v.abs().log10().floor() as i32;
        let m = v / 10f64.powi(e);
        if (m - m.round()).abs() < 1e-9 {
            return format!("{}e{e}", m.round());
        }
    }
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_short() {
        assert_eq!(label(0.1), "0.1");
        assert_eq!(label(1.0), "1");
        assert_eq!(label(1e-4), "1e-4");
        assert_eq!(label(1e6), "1e6");
        assert_eq!(label(50.0), "50");
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
