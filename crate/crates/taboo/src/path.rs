use crate::{ExcursionRecord, ExcursionTracker, Substep, TabooConfig, TabooError, TabooWalker};

use rand::Rng;

/// A recorded taboo trajectory on the base grid.
///
/// `lows[i]` is the lowest value seen on `(t_{i-1}, t_i]` (a bridge minimum
/// when the configuration asks for one), attained at `low_times[i]`, and
/// `lows[0] = values[0]`.
#[derive(Clone, Debug)]
pub struct TabooPath {
    times: Vec<f64>,
    values: Vec<f64>,
    local_time: Vec<f64>,
    lows: Vec<f64>,
    low_times: Vec<f64>,
    excursions: ExcursionTracker,
    walker: Option<(TabooWalker, f64)>,
    buf: Vec<Substep>,
}

impl TabooPath {
    /// An empty path at the configured start, ready for [`step_taboo`].
    pub fn new(cfg: &TabooConfig) -> Result<Self, TabooError> {
        let walker = TabooWalker::new(cfg)?;
        Ok(Self {
            times: vec![0.0],
            values: vec![cfg.start],
            local_time: vec![0.0],
            lows: vec![cfg.start],
            low_times: vec![0.0],
            excursions: ExcursionTracker::new(0.5),
            walker: Some((walker, cfg.step)),
            buf: Vec::new(),
        })
    }

    /// Simulates a full path up to the configured horizon.
    pub fn simulate<R: Rng + ?Sized>(cfg: &TabooConfig, rng: &mut R) -> Result<Self, TabooError> {
        let mut path = Self::new(cfg)?;
        for _ in 0..cfg.steps() {
            path.step(rng);
        }
        Ok(path)
    }

    /// Wraps externally produced samples (fixtures, imported data).
    pub fn from_samples(times: Vec<f64>, values: Vec<f64>, local_time: Vec<f64>) -> Result<Self, TabooError> {
        if times.is_empty() || times.len() != values.len() || times.len() != local_time.len() {
            return Err(TabooError::InvalidConfig("samples must be nonempty and of equal length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(TabooError::InvalidConfig("times must be increasing".into()));
        }
        let mut lows = values.clone();
        let mut low_times = times.clone();
        for i in 1..values.len() {
            if values[i - 1] <= values[i] {
                lows[i] = values[i - 1];
                low_times[i] = times[i - 1];
            }
        }
        let mut path = Self {
            times,
            values,
            local_time,
            lows,
            low_times,
            excursions: ExcursionTracker::new(0.5),
            walker: None,
            buf: Vec::new(),
        };
        path.excursions = crate::excursions::replay(&path);
        Ok(path)
    }

    /// Appends one base step of the Euler scheme.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let Some((walker, h)) = self.walker.as_mut() else {
            return;
        };
        walker.advance(*h, rng, &mut self.buf);
        let (mut low, mut low_time) = (f64::INFINITY, 0.0);
        for s in &self.buf {
            if s.low < low {
                low = s.low;
                low_time = s.low_time;
            }
            self.excursions.observe(s);
        }
        self.times.push(walker.time());
        self.values.push(walker.value());
        self.local_time.push(walker.local_time());
        self.lows.push(low);
        self.low_times.push(low_time);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn local_time(&self) -> &[f64] {
        &self.local_time
    }

    pub fn lows(&self) -> &[f64] {
        &self.lows
    }

    pub fn low_times(&self) -> &[f64] {
        &self.low_times
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("nonempty path")
    }

    pub fn clamp_events(&self) -> u64 {
        self.walker.as_ref().map_or(0, |(w, _)| w.clamp_events())
    }

    /// Excursions closed so far.
    pub fn excursions(&self) -> &[ExcursionRecord] {
        self.excursions.records()
    }
}

/// Appends one Euler step to `path`.
pub fn step_taboo<R: Rng + ?Sized>(path: &mut TabooPath, rng: &mut R) {
    path.step(rng)
}
