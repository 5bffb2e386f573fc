use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use std::f64::consts::{PI, SQRT_2};

/// Reference laws used as goodness-of-fit targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ReferenceLaw {
    /// Density `2r e^{-r²}`, CDF `1 − e^{−r²}`.
    RayleighR,
    /// Density `π² r e^{−π² r²/2}`, CDF `1 − e^{−π² r²/2}`.
    RayleighRtilde,
    /// Uniform on `[0, 1]`.
    UniformU,
    /// Product `U·R` of independent uniform and `RayleighR` variables.
    UniformTimesR,
    /// Law of `factor · X` for `X` distributed as the inner law.
    Scaled(Box<ReferenceLaw>, f64),
}

impl ReferenceLaw {
    pub fn scaled(self, factor: f64) -> Self {
        ReferenceLaw::Scaled(Box::new(self), factor)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            ReferenceLaw::RayleighR => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x * x).exp_m1()
                }
            }
            ReferenceLaw::RayleighRtilde => ReferenceLaw::RayleighR.cdf(x * PI / SQRT_2),
            ReferenceLaw::UniformU => x.clamp(0.0, 1.0),
            ReferenceLaw::UniformTimesR => {
                if x <= 0.0 {
                    0.0
                } else {
                    // P(UR ≤ y) = P(R ≤ y) + y E[1/R; R > y].
                    let v = -(-x * x).exp_m1() + x * PI.sqrt() * erfc(x);
                    v.min(1.0)
                }
            }
            ReferenceLaw::Scaled(inner, factor) => inner.cdf(x / factor),
        }
    }

    /// Quantile function (generalized inverse of the CDF) for `p ∈ (0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            ReferenceLaw::RayleighR => (-(-p).ln_1p()).sqrt(),
            ReferenceLaw::RayleighRtilde => ReferenceLaw::RayleighR.quantile(p) * SQRT_2 / PI,
            ReferenceLaw::UniformU => p.clamp(0.0, 1.0),
            ReferenceLaw::UniformTimesR => {
                let (mut lo, mut hi) = (0.0, 8.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            ReferenceLaw::Scaled(inner, factor) => factor * inner.quantile(p),
        }
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    pub fn name(&self) -> String {
        match self {
            ReferenceLaw::RayleighR => "R".into(),
            ReferenceLaw::RayleighRtilde => "R~".into(),
            ReferenceLaw::UniformU => "U".into(),
            ReferenceLaw::UniformTimesR => "U*R".into(),
            ReferenceLaw::Scaled(inner, f) => format!("{f}*{}", inner.name()),
        }
    }
}
