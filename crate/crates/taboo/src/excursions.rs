use crate::{Substep, TabooPath};
use serde::{Deserialize, Serialize};

/// One excursion below 1/2: local-time coordinate, depth and clock-time span.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcursionRecord {
    pub u: f64,
    pub a: f64,
    pub s_start: f64,
    pub s_end: f64,
}

#[derive(Clone, Copy, Debug)]
struct Open {
    u: f64,
    s_start: f64,
    min: f64,
}

/// Online decomposition of a path into excursions below 1/2.
///
/// An excursion opens when the path crosses 1/2 downwards and closes on the
/// next upward crossing; crossing times are linearly interpolated. The initial
/// stretch before the first visit to 1/2 is not an excursion from 1/2 and is
/// skipped, as is an excursion still open when the path ends. Excursions that
/// fit strictly between two grid points are invisible at this resolution.
#[derive(Clone, Debug)]
pub struct ExcursionTracker {
    keep_below: f64,
    seen_half: bool,
    open: Option<Open>,
    records: Vec<ExcursionRecord>,
    completed: u64,
}

const HALF: f64 = 0.5;

impl ExcursionTracker {
    /// Only excursions with minimum below `keep_below` are stored; all are
    /// counted.
    pub fn new(keep_below: f64) -> Self {
        Self { keep_below, seen_half: false, open: None, records: Vec::new(), completed: 0 }
    }

    pub fn observe(&mut self, s: &Substep) {
        let (a, b) = (s.k0, s.k1);
        if !self.seen_half {
            if a < HALF && b < HALF {
                return;
            }
            self.seen_half = true;
            if a < HALF {
                return;
            }
        }
        match self.open.as_mut() {
            None => {
                if a >= HALF && b < HALF {
                    let s_start = s.t0 + (s.t1 - s.t0) * (a - HALF) / (a - b);
                    self.open = Some(Open { u: s.local_time, s_start, min: s.low });
                }
            }
            Some(open) => {
                open.min = open.min.min(s.low);
                if b >= HALF {
                    let s_end = s.t0 + (s.t1 - s.t0) * (HALF - a) / (b - a);
                    let open = self.open.take().expect("open excursion");
                    if s_end > open.s_start {
                        self.completed += 1;
                        if open.min < self.keep_below {
                            self.records.push(ExcursionRecord { u: open.u, a: open.min, s_start: open.s_start, s_end });
                        }
                    }
                }
            }
        }
    }

    pub fn records(&self) -> &[ExcursionRecord] {
        &self.records
    }

    /// Removes and returns the stored records.
    pub fn drain(&mut self) -> std::vec::Drain<'_, ExcursionRecord> {
        self.records.drain(..)
    }

    pub fn into_records(self) -> Vec<ExcursionRecord> {
        self.records
    }

    /// Number of completed excursions, stored or not.
    pub fn completed(&self) -> u64 {
        self.completed
    }
}

/// Excursions below 1/2 of a recorded path, replayed from its samples.
pub fn decompose_excursions(path: &TabooPath) -> Vec<ExcursionRecord> {
    replay(path).into_records()
}

pub(crate) fn replay(path: &TabooPath) -> ExcursionTracker {
    let mut tracker = ExcursionTracker::new(HALF);
    let (t, v, l, low) = (path.times(), path.values(), path.local_time(), path.lows());
    for i in 1..v.len() {
        let low_time = if v[i - 1] <= v[i] { t[i - 1] } else { t[i] };
        tracker.observe(&Substep {
            t0: t[i - 1],
            t1: t[i],
            k0: v[i - 1],
            k1: v[i],
            low: low[i],
            low_time,
            local_time: l[i],
        });
    }
    tracker
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(values: &[f64]) -> TabooPath {
        let times: Vec<f64> = (0..values.len()).map(|i| i as f64).collect();
        let lt: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.1).collect();
        TabooPath::from_samples(times, values.to_vec(), lt).unwrap()
    }

    #[test]
    fn constant_path_has_no_excursions() {
        assert!(decompose_excursions(&path(&[0.6; 20])).is_empty());
    }

    #[test]
    fn sawtooth_has_two_excursions() {
        let p = path(&[0.6, 0.4, 0.3, 0.6, 0.45, 0.2, 0.35, 0.55, 0.7]);
        let ex = decompose_excursions(&p);
        assert_eq!(ex.len(), 2);
        assert_eq!(ex[0].a, 0.3);
        assert_eq!(ex[1].a, 0.2);
        assert!((ex[0].s_start - 0.5).abs() < 1e-12);
        assert!((ex[0].s_end - (2.0 + 2.0 / 3.0)).abs() < 1e-12);
        assert!(ex[0].s_end <= ex[1].s_start);
        assert!(ex[0].u <= ex[1].u);
        assert_eq!(ex[0].u, 0.1);
    }

    #[test]
    fn initial_stretch_and_open_tail_are_skipped() {
        let p = path(&[0.3, 0.2, 0.6, 0.4, 0.1]);
        assert!(decompose_excursions(&p).is_empty());
    }

    #[test]
    fn keep_below_filters_but_counts() {
        let mut tr = ExcursionTracker::new(0.25);
        let v = [0.6, 0.4, 0.6, 0.2, 0.6];
        for i in 1..v.len() {
            tr.observe(&Substep {
                t0: (i - 1) as f64,
                t1: i as f64,
                k0: v[i - 1],
                k1: v[i],
                low: v[i - 1].min(v[i]),
                low_time: 0.0,
                local_time: 0.0,
            });
        }
        assert_eq!(tr.completed(), 2);
        assert_eq!(tr.records().len(), 1);
        assert_eq!(tr.records()[0].a, 0.2);
    }
}
