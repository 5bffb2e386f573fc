use serde::{Deserialize, Serialize};

/// Running mean and variance (Welford), with a 3σ confidence half-width.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub n: u64,
    mean: f64,
    m2: f64,
}

impl FromIterator<f64> for MeanEstimate {
    fn from_iter<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let mut e = Self::new();
        for v in values {
            e.push(v);
        }
        e
    }
}

impl MeanEstimate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combines two estimates (order-independent up to rounding).
    pub fn merge(&self, other: &Self) -> Self {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        Self { n, mean, m2 }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_err(&self) -> f64 {
        (self.variance() / self.n.max(1) as f64).sqrt()
    }

    pub fn ci3(&self) -> f64 {
        3.0 * self.std_err()
    }
}

/// Binomial proportion with a 3σ half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionEstimate {
    pub successes: u64,
    pub trials: u64,
}

impl ProportionEstimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        Self { successes, trials }
    }

    pub fn p(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn std_err(&self) -> f64 {
        let p = self.p();
        (p * (1.0 - p) / self.trials.max(1) as f64).sqrt()
    }

    pub fn ci3(&self) -> f64 {
        3.0 * self.std_err()
    }
}
