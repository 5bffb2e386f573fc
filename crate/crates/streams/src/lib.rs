//! Counter-based random streams.
//!
//! Every replica of every experiment draws from its own ChaCha8 stream,
//! addressed by `(seed, domain, index)`. The stream contents depend only on
//! that address, so results do not depend on how replicas are scheduled
//! across threads.

pub mod bridge;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

/// A single random stream. Implements [`RngCore`], so it plugs into any
/// `rand`/`rand_distr` sampler.
#[derive(Clone, Debug)]
pub struct RandomSource {
    inner: ChaCha8Rng,
}

impl RandomSource {
    /// Stream 0 of the root seed.
    pub fn from_seed(seed: u64) -> Self {
        Streams::new(seed).stream(0, 0)
    }

    /// Standard normal variate.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.sample(StandardNormal)
    }

    /// Uniform variate on the open interval (0, 1).
    #[inline]
    pub fn open01(&mut self) -> f64 {
        open01(self)
    }

    /// Exponential variate with the given rate.
    #[inline]
    pub fn exp(&mut self, rate: f64) -> f64 {
        let e: f64 = self.sample(Exp1);
        e / rate
    }
}

impl RngCore for RandomSource {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Standard normal variate (ziggurat).
#[inline]
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniform variate on (0, 1), never exactly 0 or 1. Useful before `ln`.
#[inline]
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 53 random bits, shifted by half an ulp away from zero.
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Factory for addressed substreams of one root seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Streams {
    seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream for replica `index` of the experiment component `domain`.
    ///
    /// The key is derived from `(seed, domain)` by a splitmix64 mix and the
    /// replica index selects the ChaCha stream word, so distinct addresses
    /// never share keystream.
    pub fn stream(&self, domain: u64, index: u64) -> RandomSource {
        let mut key = [0u8; 32];
        let mut state = self.seed ^ domain.wrapping_mul(0xA076_1D64_78BD_642F);
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(index);
        RandomSource { inner }
    }

    /// A child factory, for components that split their stream again.
    pub fn child(&self, domain: u64) -> Streams {
        let mut state = self.seed ^ domain.wrapping_mul(0xE703_7ED1_A0B4_28DB);
        Streams::new(splitmix64(&mut state))
    }
}

/// Stable 64-bit tag for a domain name, so experiments can address streams
/// by string.
pub fn domain_tag(name: &str) -> u64 {
    // FNV-1a; stable across platforms and compiler versions.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_address_same_stream() {
        let s = Streams::new(42);
        let a: Vec<u64> = (0..8).map(|_| s.stream(3, 9).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut x = s.stream(3, 9);
        let mut y = s.stream(3, 9);
        for _ in 0..100 {
            assert_eq!(x.next_u64(), y.next_u64());
        }
    }

    #[test]
    fn distinct_addresses_differ() {
        let s = Streams::new(42);
        let first = |d, i| s.stream(d, i).next_u64();
        assert_ne!(first(0, 0), first(0, 1));
        assert_ne!(first(0, 0), first(1, 0));
        assert_ne!(Streams::new(1).stream(0, 0).next_u64(), Streams::new(2).stream(0, 0).next_u64());
    }

    #[test]
    fn open01_stays_inside() {
        let mut r = RandomSource::from_seed(5);
        for _ in 0..100_000 {
            let u = r.open01();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn neighbouring_streams_are_uncorrelated() {
        let s = Streams::new(11);
        let n = 200_000;
        let mut a = s.stream(0, 0);
        let mut b = s.stream(0, 1);
        let mut sxy = 0.0;
        for _ in 0..n {
            sxy += a.normal() * b.normal();
        }
        // Standard error of the sample correlation is 1/sqrt(n).
        assert!((sxy / n as f64).abs() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn normal_and_exp_moments() {
        let mut r = RandomSource::from_seed(3);
        let n = 200_000;
        let (mut m1, mut m2, mut e) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let z = r.normal();
            m1 += z;
            m2 += z * z;
            e += r.exp(2.0);
        }
        let n = n as f64;
        assert!((m1 / n).abs() < 0.01);
        assert!((m2 / n - 1.0).abs() < 0.01);
        assert!((e / n - 0.5).abs() < 0.005);
    }

    #[test]
    fn domain_tags_are_stable() {
        assert_eq!(domain_tag(""), 0xcbf2_9ce4_8422_2325);
        assert_ne!(domain_tag("spine"), domain_tag("bbm"));
    }
}
