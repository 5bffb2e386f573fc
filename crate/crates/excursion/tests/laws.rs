//! Limit laws of the excursion point process and of drifted taboo minima.

use excursion_ppp::{
    excursion_ppp_min_from_taboo, ppp_min, sample_excursion_ppp, sample_triangle_model, simulate_drifted_min,
    DriftedMinProblem,
};
use mc_streams::Streams;
use stat_lab::{ks_test, ks_two_sample, pearson, ReferenceLaw};
use std::f64::consts::PI;
use taboo_diffusion::{TabooConfig, TabooScheme};

const HALF_PI_SQ: f64 = PI * PI / 2.0;

#[test]
fn triangle_tail_is_gaussian_in_t() {
    let n = 200_000;
    let streams = Streams::new(201);
    let mut rng = streams.stream(0, 0);
    let draws: Vec<_> = (0..n).map(|_| sample_triangle_model(HALF_PI_SQ, &mut rng)).collect();
    for t in [0.2, 0.4, 0.6] {
        let p = (-HALF_PI_SQ * t * t).exp();
        let hat = draws.iter().filter(|d| d.min_value > t).count() as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hat - p).abs() < 3.5 * se, "t={t}: {hat} vs {p}");
    }
    assert!(draws.iter().all(|d| d.second_min > d.min_value));
    let m: Vec<f64> = draws.iter().map(|d| d.min_value).collect();
    let ratio: Vec<f64> = draws.iter().map(|d| d.argmin / (2.0 * d.min_value)).collect();
    assert!(pearson(&m, &ratio).unwrap().abs() < 0.01);
    assert!(ks_test(&ratio, &ReferenceLaw::UniformU, 1.63 / (n as f64).sqrt()).unwrap().pass);
}

#[test]
fn other_intensities_follow_the_same_tail() {
    let rate: f64 = 3.0;
    let n = 100_000;
    let mut rng = Streams::new(202).stream(0, 0);
    let t = 0.5;
    let p = (-rate * t * t).exp();
    let hat = (0..n).filter(|_| sample_triangle_model(rate, &mut rng).min_value > t).count() as f64 / n as f64;
    assert!((hat - p).abs() < 3.5 * (p * (1.0 - p) / n as f64).sqrt());
}

#[test]
fn excursion_ppp_minimum_rescales_to_rtilde() {
    let gamma = 1e-4;
    let n = 20_000;
    let streams = Streams::new(203);
    let pairs: Vec<(f64, f64)> = (0..n as u64)
        .map(|i| {
            let mut rng = streams.stream(0, i);
            let pts = sample_excursion_ppp(gamma, (0.0, f64::INFINITY), &mut rng);
            let r = ppp_min(gamma, &pts, (0.0, f64::INFINITY)).unwrap();
            (r.min_value / gamma.sqrt(), gamma.sqrt() * r.argmin)
        })
        .collect();
    let m: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ratio: Vec<f64> = pairs.iter().map(|p| p.1 / (2.0 * p.0)).collect();
    // Finite γ: sec² corrections to the intensity are O(γ), far below KS noise.
    assert!(ks_test(&m, &ReferenceLaw::RayleighRtilde, 1.63 / (n as f64).sqrt()).unwrap().pass);
    assert!(ks_test(&ratio, &ReferenceLaw::UniformU, 1.63 / (n as f64).sqrt()).unwrap().pass);
}

/// `E[min(1, w/(2R̃))]` by quadrature: the chance that the unconstrained
/// minimizer falls left of the window start `w/√γ`.
fn left_of_window(w: f64) -> f64 {
    let density = |r: f64| PI * PI * r * (-HALF_PI_SQ * r * r).exp();
    let n = 200_000;
    let h = 4.0 / n as f64;
    (0..n)
        .map(|i| {
            let r = (i as f64 + 0.5) * h;
            (w / (2.0 * r)).min(1.0) * density(r) * h
        })
        .sum()
}

#[test]
fn window_constraint_agreement_matches_its_exact_law() {
    let n = 20_000;
    let streams = Streams::new(204);
    for (j, gamma) in [1e-4f64, 1e-12].into_iter().enumerate() {
        let start = gamma.powf(-0.25);
        let agree = (0..n as u64)
            .filter(|&i| {
                let mut rng = streams.stream(j as u64, i);
                let pts = sample_excursion_ppp(gamma, (0.0, f64::INFINITY), &mut rng);
                let free = ppp_min(gamma, &pts, (0.0, f64::INFINITY)).unwrap();
                match ppp_min(gamma, &pts, (start, f64::INFINITY)) {
                    Ok(r) => r.argmin == free.argmin,
                    Err(_) => false,
                }
            })
            .count() as f64
            / n as f64;
        let p = 1.0 - left_of_window(gamma.powf(0.25));
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((agree - p).abs() < 4.0 * se + 1e-4, "γ={gamma}: {agree} vs {p}");
        if gamma < 1e-10 {
            assert!(agree >= 0.99);
        }
    }
}

fn split_cfg(step: f64) -> TabooConfig {
    TabooConfig {
        step,
        horizon: 1e9,
        bridge_low_below: Some(0.5),
        scheme: TabooScheme::BesselSplit,
        ..Default::default()
    }
}

#[test]
fn taboo_excursion_minimum_is_close_to_rtilde() {
    let gamma = 1e-3;
    let n = 1000;
    let streams = Streams::new(205);
    let cfg = split_cfg(1e-3);
    let m: Vec<f64> = (0..n as u64)
        .map(|i| {
            let r = excursion_ppp_min_from_taboo(gamma, (0.0, f64::INFINITY), &cfg, &mut streams.stream(0, i)).unwrap();
            r.min_value / gamma.sqrt()
        })
        .collect();
    let rep = ks_test(&m, &ReferenceLaw::RayleighRtilde, 0.07).unwrap();
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn drifted_minimum_is_close_to_rtilde_with_uniform_position() {
    let gamma = 1e-3;
    let n = 1000;
    let streams = Streams::new(206);
    let problem = DriftedMinProblem::standard(gamma, 100.0 / gamma.sqrt(), 0.5).unwrap();
    let cfg = split_cfg(1e-3);
    let out: Vec<(f64, f64)> = (0..n as u64)
        .map(|i| {
            let o = simulate_drifted_min(&problem, &cfg, &mut streams.stream(0, i)).unwrap();
            let m = o.result.min_value / gamma.sqrt();
            (m, gamma.sqrt() * o.result.argmin / m)
        })
        .collect();
    let m: Vec<f64> = out.iter().map(|p| p.0).collect();
    let ratio: Vec<f64> = out.iter().map(|p| p.1).collect();
    let rep = ks_test(&m, &ReferenceLaw::RayleighRtilde, 0.07).unwrap();
    assert!(rep.pass, "{rep:?}");
    let rep = ks_test(&ratio, &ReferenceLaw::UniformU, 0.07).unwrap();
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn drifted_minimum_is_insensitive_to_the_step() {
    let gamma = 1e-2;
    let n = 400;
    let streams = Streams::new(207);
    let problem = DriftedMinProblem::standard(gamma, 1000.0, 0.5).unwrap();
    let run = |step: f64, domain: u64| -> Vec<f64> {
        let cfg = split_cfg(step);
        (0..n as u64)
            .map(|i| simulate_drifted_min(&problem, &cfg, &mut streams.stream(domain, i)).unwrap().result.min_value)
            .collect()
    };
    let coarse = run(1e-3, 0);
    let fine = run(1e-4, 1);
    let rep = ks_two_sample(&coarse, &fine, 1.63 * (2.0 / n as f64).sqrt()).unwrap();
    assert!(rep.pass, "{rep:?}");
}
