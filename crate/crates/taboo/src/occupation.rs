use std::f64::consts::PI;

/// CDF of the stationary density `2 sin²(πy)`.
pub fn stationary_cdf(y: f64) -> f64 {
    let y = y.clamp(0.0, 1.0);
    y - (2.0 * PI * y).sin() / (2.0 * PI)
}

/// Time-weighted histogram of visited positions in (0,1).
#[derive(Clone, Debug)]
pub struct Occupation {
    weights: Vec<f64>,
    total: f64,
}

impl Occupation {
    pub fn new(bins: usize) -> Self {
        Self { weights: vec![0.0; bins.max(1)], total: 0.0 }
    }

    /// Adds `dt` units of time spent at `y`.
    #[inline]
    pub fn record(&mut self, y: f64, dt: f64) {
        let n = self.weights.len();
        let i = ((y * n as f64) as usize).min(n - 1);
        self.weights[i] += dt;
        self.total += dt;
    }

    pub fn total_time(&self) -> f64 {
        self.total
    }

    /// Occupation CDF at the bin edges, `(y, F_occ(y))`.
    pub fn cumulative(&self) -> Vec<(f64, f64)> {
        let n = self.weights.len();
        let mut acc = 0.0;
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                acc += w;
                ((i + 1) as f64 / n as f64, acc / self.total)
            })
            .collect()
    }

    /// `sup_y |F_occ(y) − F_stat(y)|`, evaluated at the bin edges.
    pub fn sup_error(&self) -> f64 {
        self.cumulative().into_iter().map(|(y, f)| (f - stationary_cdf(y)).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_cdf_endpoints_and_symmetry() {
        assert_eq!(stationary_cdf(0.0), 0.0);
        assert!((stationary_cdf(1.0) - 1.0).abs() < 1e-15);
        assert!((stationary_cdf(0.5) - 0.5).abs() < 1e-15);
        assert!((stationary_cdf(0.3) + stationary_cdf(0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_weights_have_zero_error() {
        let n = 100;
        let mut occ = Occupation::new(n);
        for i in 0..n {
            let (a, b) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
            occ.record(0.5 * (a + b), stationary_cdf(b) - stationary_cdf(a));
        }
        assert!(occ.sup_error() < 1e-12);
    }
}
