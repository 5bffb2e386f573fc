use crate::{ReferenceLaw, StatError};
use serde::{Deserialize, Serialize};

/// Asymptotic 99% critical value of the one-sample KS statistic.
pub fn ks_critical_99(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Outcome of a fixed-threshold KS test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub statistic: f64,
    pub n: usize,
    pub threshold: f64,
    pub pass: bool,
}

impl KsReport {
    fn new(statistic: f64, n: usize, threshold: f64) -> Self {
        Self { statistic, n, threshold, pass: statistic < threshold }
    }
}

/// Empirical CDF of a sample.
#[derive(Clone, Debug)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(sample: &[f64]) -> Result<Self, StatError> {
        if sample.is_empty() {
            return Err(StatError::EmptySample);
        }
        if sample.iter().any(|x| !x.is_finite()) {
            return Err(StatError::NonFinite);
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    /// Fraction of the sample `≤ x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Empirical quantile (lower, type-1).
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[idx]
    }
}

/// One-sample KS distance `sup |F_n − F|` against an arbitrary continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64, StatError> {
    let ecdf = Ecdf::new(sample)?;
    let n = ecdf.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in ecdf.sorted().iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// One-sample KS test of `sample` against `law`, passing iff `D < threshold`.
pub fn ks_test(sample: &[f64], law: &ReferenceLaw, threshold: f64) -> Result<KsReport, StatError> {
    let d = ks_statistic(sample, |x| law.cdf(x))?;
    Ok(KsReport::new(d, sample.len(), threshold))
}

/// Two-sample KS test; `n` in the report is the effective size `n·m/(n+m)`.
pub fn ks_two_sample(a: &[f64], b: &[f64], threshold: f64) -> Result<KsReport, StatError> {
    let ea = Ecdf::new(a)?;
    let eb = Ecdf::new(b)?;
    let (xs, ys) = (ea.sorted(), eb.sorted());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let eff = (n * m / (n + m)).round() as usize;
    Ok(KsReport::new(d, eff, threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mc_streams::RandomSource;

    #[test]
    fn empty_sample_is_an_error() {
        assert_eq!(ks_test(&[], &ReferenceLaw::UniformU, 0.1), Err(StatError::EmptySample));
    }

    #[test]
    fn constant_sample_is_far_from_continuous_law() {
        let r = ks_test(&[0.8; 50], &ReferenceLaw::RayleighR, 0.1).unwrap();
        assert!(r.statistic >= 0.5);
        assert!(!r.pass);
    }

    #[test]
    fn stratified_quantiles_give_half_over_n() {
        let law = ReferenceLaw::RayleighRtilde;
        let n = 1000;
        let sample: Vec<f64> = (1..=n).map(|i| law.quantile((i as f64 - 0.5) / n as f64)).collect();
        let r = ks_test(&sample, &law, 1.0).unwrap();
        assert!((r.statistic - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn exact_sample_passes_critical_value() {
        let mut rng = RandomSource::from_seed(17);
        let law = ReferenceLaw::RayleighR;
        let n = 100_000;
        let sample: Vec<f64> = (0..n).map(|_| law.quantile(rng.open01())).collect();
        let r = ks_test(&sample, &law, ks_critical_99(n)).unwrap();
        assert!(r.pass, "D = {}", r.statistic);
    }

    #[test]
    fn two_sample_identical_is_zero_and_disjoint_is_one() {
        let a = [0.1, 0.5, 0.3];
        assert_eq!(ks_two_sample(&a, &a, 0.1).unwrap().statistic, 0.0);
        assert_eq!(ks_two_sample(&a, &[1.0, 2.0], 0.1).unwrap().statistic, 1.0);
    }

    #[test]
    fn two_sample_handles_ties() {
        let a = [1.0, 1.0, 2.0, 2.0];
        let b = [1.0, 2.0];
        assert_eq!(ks_two_sample(&a, &b, 0.1).unwrap().statistic, 0.0);
    }

    #[test]
    fn ecdf_eval_and_quantile() {
        let e = Ecdf::new(&[3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(e.eval(0.0), 0.0);
        assert_eq!(e.eval(2.0), 0.5);
        assert_eq!(e.eval(9.0), 1.0);
        assert_eq!(e.quantile(0.5), 2.0);
        assert_eq!(e.quantile(1.0), 4.0);
    }
}
