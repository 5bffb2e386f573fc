use crate::BbmError;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Default cap on the offspring support.
pub const DEFAULT_SUPPORT_CAP: usize = 10;

/// Offspring distribution `p_0..p_K` with mean `m + 1` and branching rate
/// `β = 1/(2m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LawSpec", into = "LawSpec")]
pub struct OffspringLaw {
    probs: Vec<f64>,
    cdf: Vec<f64>,
    biased_cdf: Vec<f64>,
    m: f64,
    beta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct LawSpec {
    probs: Vec<f64>,
}

impl TryFrom<LawSpec> for OffspringLaw {
    type Error = BbmError;
    fn try_from(s: LawSpec) -> Result<Self, BbmError> {
        Self::new(s.probs)
    }
}

impl From<OffspringLaw> for LawSpec {
    fn from(l: OffspringLaw) -> Self {
        LawSpec { probs: l.probs }
    }
}

fn running_sum(w: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = w
        .map(|x| {
            acc += x;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = f64::INFINITY;
    }
    out
}

impl OffspringLaw {
    pub fn new(probs: Vec<f64>) -> Result<Self, BbmError> {
        Self::with_support_cap(probs, DEFAULT_SUPPORT_CAP)
    }

    pub fn with_support_cap(probs: Vec<f64>, cap: usize) -> Result<Self, BbmError> {
        let bad = |m: String| Err(BbmError::InvalidLaw(m));
        if probs.is_empty() || probs.len() > cap + 1 {
            return bad(format!("support must be within 0..={cap}"));
        }
        if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return bad("probabilities must be nonnegative".into());
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("probabilities sum to {total}"));
        }
        let mean: f64 = probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let m = mean - 1.0;
        if !(m > 0.0) {
            return bad(format!("mean offspring {mean} must exceed 1"));
        }
        let cdf = running_sum(probs.iter().copied());
        let biased_cdf = running_sum(probs.iter().enumerate().map(|(k, p)| k as f64 * p / mean));
        Ok(Self { probs, cdf, biased_cdf, m, beta: 1.0 / (2.0 * m) })
    }

    /// `p_2 = 1`: `m = 1`, `β = 1/2`.
    pub fn binary() -> Self {
        Self::new(vec![0.0, 0.0, 1.0]).expect("valid law")
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `m = E[k] − 1`.
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.m + 1.0
    }

    /// Branching rate along a spine, `(m + 1)β`.
    pub fn spine_rate(&self) -> f64 {
        self.mean() * self.beta
    }

    pub fn max_offspring(&self) -> usize {
        self.probs.len() - 1
    }

    fn invert(cdf: &[f64], u: f64) -> usize {
        cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        Self::invert(&self.cdf, rng.random::<f64>())
    }

    /// Draw from the size-biased law `k p_k / (m + 1)`.
    pub fn sample_size_biased<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        Self::invert(&self.biased_cdf, rng.random::<f64>())
    }

    pub fn size_biased_probs(&self) -> Vec<f64> {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p / self.mean()).collect()
    }

    /// Generating function `G(z) = Σ p_k z^k`.
    pub fn generating_function(&self, z: f64) -> f64 {
        self.probs.iter().rev().fold(0.0, |acc, p| acc * z + p)
    }

    /// `G'(z) = Σ k p_k z^{k−1}`.
    pub fn generating_derivative(&self, z: f64) -> f64 {
        self.probs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, p)| acc * z + k as f64 * p)
    }

    /// Smallest fixed point of `G` in `[0, 1]`.
    pub fn extinction_probability(&self) -> f64 {
        let mut q = 0.0;
        for _ in 0..10_000 {
            let next = self.generating_function(q);
            if (next - q).abs() < 1e-15 {
                return next;
            }
            q = next;
        }
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mc_streams::RandomSource;

    #[test]
    fn degenerate_law_is_rejected() {
        assert!(OffspringLaw::new(vec![0.0, 1.0]).is_err());
        assert!(OffspringLaw::new(vec![0.5, 0.0, 0.5]).is_err());
        assert!(OffspringLaw::new(vec![0.2, 0.2]).is_err());
        assert!(OffspringLaw::new(vec![-0.1, 0.0, 1.1]).is_err());
        let mut wide = vec![0.0; 12];
        wide[11] = 1.0;
        assert!(OffspringLaw::new(wide).is_err());
    }

    #[test]
    fn binary_parameters() {
        let law = OffspringLaw::binary();
        assert_eq!(law.m(), 1.0);
        assert_eq!(law.beta(), 0.5);
        assert_eq!(law.beta() * law.m(), 0.5);
        assert_eq!(law.spine_rate(), 1.0);
        assert_eq!(law.size_biased_probs(), vec![0.0, 0.0, 1.0]);
        let mut rng = RandomSource::from_seed(1);
        assert!((0..100).all(|_| law.sample_size_biased(&mut rng) == 2));
        assert_eq!(law.extinction_probability(), 0.0);
    }

    #[test]
    fn extinction_probability_is_a_fixed_point() {
        let law = OffspringLaw::new(vec![0.25, 0.25, 0.25, 0.25]).unwrap();
        let q = law.extinction_probability();
        // G(q) = q reduces to q³ + q² − 3q + 1 = 0, root √2 − 1.
        assert!((q - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((law.m() - 0.5).abs() < 1e-15 && (law.beta() - 1.0).abs() < 1e-15);
        // G'(z) = 0.25 + 0.5z + 0.75z².
        assert!((law.generating_derivative(0.5) - (0.25 + 0.25 + 0.1875)).abs() < 1e-15);
        assert!((law.generating_derivative(1.0) - law.mean()).abs() < 1e-15);
    }

    #[test]
    fn samples_follow_the_law() {
        let law = OffspringLaw::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let mut rng = RandomSource::from_seed(2);
        let n = 100_000;
        let mut counts = [0usize; 4];
        let mut biased = [0usize; 4];
        for _ in 0..n {
            counts[law.sample(&mut rng)] += 1;
            biased[law.sample_size_biased(&mut rng)] += 1;
        }
        for k in 0..4 {
            let p = law.probs()[k];
            assert!((counts[k] as f64 / n as f64 - p).abs() < 5.0 * (p * (1.0 - p) / n as f64).sqrt() + 1e-9);
            let q = law.size_biased_probs()[k];
            assert!((biased[k] as f64 / n as f64 - q).abs() < 5.0 * (q * (1.0 - q) / n as f64).sqrt() + 1e-9);
        }
        assert_eq!(biased[0], 0);
    }

    #[test]
    fn serde_round_trip_validates() {
        let law = OffspringLaw::new(vec![0.1, 0.2, 0.7]).unwrap();
        let json = serde_json::to_string(&law).unwrap();
        assert_eq!(json, r#"{"probs":[0.1,0.2,0.7]}"#);
        assert_eq!(serde_json::from_str::<OffspringLaw>(&json).unwrap(), law);
        assert!(serde_json::from_str::<OffspringLaw>(r#"{"probs":[0.0,1.0]}"#).is_err());
    }
}
