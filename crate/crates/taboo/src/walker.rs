use crate::{drift_unchecked, TabooConfig, TabooError, TabooScheme};
use mc_streams::bridge::bridge_min_above;
use mc_streams::open01;
use mc_streams::standard_normal as normal;
use rand::Rng;

/// One substep `(t0, k0) → (t1, k1)`, with the lowest value seen on it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Substep {
    pub t0: f64,
    pub t1: f64,
    pub k0: f64,
    pub k1: f64,
    /// Bridge minimum if sampled, else `min(k0, k1)`.
    pub low: f64,
    /// Time attributed to `low` (the lower endpoint's time).
    pub low_time: f64,
    /// Local-time estimate at `t1`.
    pub local_time: f64,
}

/// Discretized state of the taboo process.
#[derive(Clone, Debug)]
pub struct TabooWalker {
    time: f64,
    value: f64,
    local_time: f64,
    clamp_events: u64,
    guard: f64,
    band: f64,
    refinement: Option<f64>,
    bridge_low_below: Option<f64>,
    scheme: TabooScheme,
}

impl TabooWalker {
    pub fn new(cfg: &TabooConfig) -> Result<Self, TabooError> {
        cfg.validate()?;
        let guard = cfg.boundary_guard;
        Ok(Self {
            time: 0.0,
            value: cfg.start.clamp(guard, 1.0 - guard),
            local_time: 0.0,
            clamp_events: 0,
            guard,
            band: cfg.local_time_band,
            refinement: cfg.refinement,
            bridge_low_below: cfg.bridge_low_below,
            scheme: cfg.scheme,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn local_time(&self) -> f64 {
        self.local_time
    }

    pub fn clamp_events(&self) -> u64 {
        self.clamp_events
    }

    /// Advances by `h`, appending the substeps taken to `out` (cleared first).
    ///
    /// Without refinement, or under [`TabooScheme::BesselSplit`], this is a
    /// single step.
    pub fn advance<R: Rng + ?Sized>(&mut self, h: f64, rng: &mut R, out: &mut Vec<Substep>) {
        out.clear();
        let t_end = self.time + h;
        let refinement = match self.scheme {
            TabooScheme::Euler => self.refinement,
            TabooScheme::BesselSplit => None,
        };
        match refinement {
            None => out.push(self.substep(h, rng)),
            Some(kappa) => loop {
                let remaining = t_end - self.time;
                let dist = self.value.min(1.0 - self.value);
                let local = (kappa * dist) * (kappa * dist);
                if local >= remaining * (1.0 - 1e-12) {
                    let mut s = self.substep(remaining, rng);
                    s.t1 = t_end;
                    self.time = t_end;
                    out.push(s);
                    break;
                }
                out.push(self.substep(local, rng));
            },
        }
    }

    #[inline]
    fn substep<R: Rng + ?Sized>(&mut self, h: f64, rng: &mut R) -> Substep {
        let (t0, k0) = (self.time, self.value);
        if (k0 - 0.5).abs() < self.band {
            self.local_time += h / (2.0 * self.band);
        }
        let mut k1 = match self.scheme {
            TabooScheme::Euler => k0 + drift_unchecked(k0) * h + h.sqrt() * normal(rng),
            TabooScheme::BesselSplit => bessel_split_step(k0, h, rng),
        };
        if !(k1 >= self.guard) {
            k1 = self.guard;
            self.clamp_events += 1;
        } else if k1 > 1.0 - self.guard {
            k1 = 1.0 - self.guard;
            self.clamp_events += 1;
        }
        let t1 = t0 + h;
        let (mut low, low_time) = if k0 <= k1 { (k0, t0) } else { (k1, t1) };
        if let Some(level) = self.bridge_low_below {
            if low < level {
                low = bridge_min_above(k0, k1, h, 0.0, open01(rng)).max(self.guard);
            }
        }
        self.time = t1;
        self.value = k1;
        Substep { t0, t1, k0, k1, low, low_time, local_time: self.local_time }
    }
}

/// Bessel-3 step of the distance to the nearer boundary, then the bounded
/// remainder of the drift. The taboo SDE is symmetric under `K ↦ 1 − K`.
#[inline]
fn bessel_split_step<R: Rng + ?Sized>(k: f64, h: f64, rng: &mut R) -> f64 {
    let upper = k > 0.5;
    let y = if upper { 1.0 - k } else { k };
    let x = y + h.sqrt() * normal(rng);
    let radial = (x * x - 2.0 * h * open01(rng).ln()).sqrt();
    let y1 = radial + remainder_drift(y) * h;
    if upper {
        1.0 - y1
    } else {
        y1
    }
}

/// `π cot(πy) − 1/y`, bounded on `(0, 1/2]`.
#[inline]
fn remainder_drift(y: f64) -> f64 {
    if y < 1e-4 {
        -std::f64::consts::PI.powi(2) * y / 3.0
    } else {
        drift_unchecked(y) - 1.0 / y
    }
}
