use excursion_ppp::{excursion_density, excursion_rate_below, ppp_min, sample_triangle_model, PppPoint};
use mc_streams::RandomSource;
use proptest::prelude::*;

fn points() -> impl Strategy<Value = Vec<PppPoint>> {
    prop::collection::vec((0.0f64..100.0, 0.0f64..0.5).prop_map(|(u, a)| PppPoint { u, a }), 1..40)
}

proptest! {
    #[test]
    fn rate_is_increasing_with_positive_density(a in 1e-4f64..0.49, b in 1e-4f64..0.49) {
        let (lo, hi) = (a.min(b), a.max(b));
        if lo < hi {
            prop_assert!(excursion_rate_below(lo).unwrap() < excursion_rate_below(hi).unwrap());
        }
        prop_assert!(excursion_density(lo).unwrap() > 0.0);
    }

    #[test]
    fn window_minimum_is_never_below_the_free_minimum(pts in points(), gamma in 1e-4f64..1.0, lo in 0.0f64..50.0) {
        let free = ppp_min(gamma, &pts, (0.0, f64::INFINITY)).unwrap();
        prop_assert!(free.second_min >= free.min_value);
        if let Ok(w) = ppp_min(gamma, &pts, (lo, f64::INFINITY)) {
            prop_assert!(w.min_value >= free.min_value);
            prop_assert!(w.argmin >= lo);
        }
        // The minimum is attained by one of the points.
        prop_assert!(pts.iter().any(|p| p.a + gamma * p.u / 2.0 == free.min_value && p.u == free.argmin));
    }

    #[test]
    fn triangle_draws_are_well_formed(seed in 0u64..10_000, rate in 0.1f64..100.0) {
        let r = sample_triangle_model(rate, &mut RandomSource::from_seed(seed));
        prop_assert!(r.min_value > 0.0 && r.second_min > r.min_value);
        prop_assert!(r.argmin >= 0.0 && r.argmin <= 2.0 * r.min_value);
    }
}
