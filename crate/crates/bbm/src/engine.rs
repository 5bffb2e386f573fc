use crate::functionals::{barrier, critical_c, z_term};
use crate::{BbmError, OffspringLaw};
use mc_streams::bridge::bridge_max;
use mc_streams::{open01, standard_normal};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Kill and barrier-crossing probabilities `e^{-q}` are skipped beyond this
/// exponent (`e^{-37} < 1e-16`).
const NEGLIGIBLE_EXPONENT: f64 = 37.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BbmConfig {
    /// Absolute end time of the run.
    pub horizon: f64,
    /// Grid step between absorption checks. Survival events are exact at any
    /// step; only the maximum envelope and argmax resolution depend on it.
    pub dt: f64,
    pub population_cap: usize,
    /// Absolute times at which functionals are recorded (added to the grid).
    pub checkpoints: Vec<f64>,
    /// Horizon `t` of the barrier `L_t` used by `Z`, `Z′`. `None` skips them.
    pub barrier_horizon: Option<f64>,
    pub record_positions: bool,
    /// Record `M(s)` on the grid and at every new all-time maximum.
    pub record_envelope: bool,
    /// Sample within-step bridge maxima for the all-time maximum.
    pub track_maximum: bool,
    /// End the run once the all-time maximum reaches this level.
    pub stop_above: Option<f64>,
    /// Keep the Ulam–Harris genealogy.
    pub genealogy: bool,
    /// `false` switches branching off: single particles with absorption.
    pub branching: bool,
}

impl Default for BbmConfig {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            dt: 1e-3,
            population_cap: 1_000_000,
            checkpoints: Vec::new(),
            barrier_horizon: None,
            record_positions: false,
            record_envelope: false,
            track_maximum: true,
            stop_above: None,
            genealogy: false,
            branching: true,
        }
    }
}

impl BbmConfig {
    pub fn validate(&self) -> Result<(), BbmError> {
        let bad = |m: &str| Err(BbmError::InvalidConfig(m.to_string()));
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return bad("horizon must be positive and finite");
        }
        if !(self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if self.population_cap == 0 {
            return bad("population cap must be positive");
        }
        if self.checkpoints.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return bad("checkpoints must be finite and nonnegative");
        }
        if let Some(t) = self.barrier_horizon {
            if !(t > 0.0) {
                return bad("barrier horizon must be positive");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub time: f64,
    pub population: usize,
    /// Largest current position `M(s)`, absent once extinct.
    pub max_position: Option<f64>,
    pub v: f64,
    /// `Σ e^{X_u(s)}`.
    pub sum_exp: f64,
    pub z: Option<f64>,
    pub z_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub positions: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BbmRunResult {
    pub start_time: f64,
    /// `ζ`; `None` when the run was censored or stopped early.
    pub extinction_time: Option<f64>,
    /// Last time simulated.
    pub end_time: f64,
    pub stopped_above: bool,
    pub all_time_max: f64,
    pub argmax_time: f64,
    pub max_envelope: Vec<(f64, f64)>,
    pub checkpoints: Vec<Checkpoint>,
    pub branch_events: u64,
    pub final_positions: Vec<f64>,
}

impl BbmRunResult {
    pub fn survived_to(&self, s: f64) -> bool {
        match self.extinction_time {
            Some(z) => z > s,
            None => self.end_time >= s,
        }
    }

    pub fn checkpoint_at(&self, s: f64) -> Option<&Checkpoint> {
        self.checkpoints.iter().find(|c| c.time == s)
    }
}

/// A particle as seen from outside the engine.
#[derive(Clone, Debug, PartialEq)]
pub struct Particle {
    pub label: Vec<u32>,
    pub position: f64,
    pub born_at: f64,
}

/// Reusable simulation state. All buffers are kept between runs.
#[derive(Debug, Default)]
pub struct BbmEngine {
    pos: Vec<f64>,
    at: Vec<f64>,
    clock: Vec<f64>,
    born: Vec<f64>,
    inside: Vec<bool>,
    node: Vec<u32>,
    /// Genealogy arena: `(parent node, child index)`; node 0 is unused.
    tree: Vec<(u32, u32)>,
}

struct RunState {
    record: f64,
    argmax: f64,
    last_death: f64,
    branch_events: u64,
    envelope: Vec<(f64, f64)>,
}

impl BbmEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs from a single particle at `x > 0` at time 0.
    pub fn run<R: Rng + ?Sized>(
        &mut self,
        x: f64,
        law: &OffspringLaw,
        cfg: &BbmConfig,
        rng: &mut R,
    ) -> Result<BbmRunResult, BbmError> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(BbmError::Domain { what: "starting position", value: x });
        }
        self.run_population(&[x], 0.0, law, cfg, rng)
    }

    /// Runs from the given positions at `start_time` up to `cfg.horizon`.
    /// Branching clocks are memoryless, so fresh clocks are drawn.
    pub fn run_population<R: Rng + ?Sized>(
        &mut self,
        initial: &[f64],
        start_time: f64,
        law: &OffspringLaw,
        cfg: &BbmConfig,
        rng: &mut R,
    ) -> Result<BbmRunResult, BbmError> {
        cfg.validate()?;
        if initial.iter().any(|x| !(*x > 0.0)) {
            return Err(BbmError::Domain {
                what: "starting position",
                value: initial.iter().copied().fold(f64::NAN, f64::min),
            });
        }
        if !(start_time < cfg.horizon) {
            return Err(BbmError::InvalidConfig("start time must precede the horizon".into()));
        }
        if initial.len() > cfg.population_cap {
            return Err(BbmError::PopulationCap { cap: cfg.population_cap, time: start_time });
        }
        self.clear();
        let beta = if cfg.branching { law.beta() } else { 0.0 };
        for (j, &x) in initial.iter().enumerate() {
            let id = if cfg.genealogy { self.new_node(0, j as u32 + 1) } else { 0 };
            let inside = cfg.barrier_horizon.is_some_and(|t| start_time < t && x <= barrier(t, start_time));
            self.push(x, start_time, start_time + exp_time(beta, rng), inside, id);
        }
        let first = initial.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut st = RunState {
            record: first,
            argmax: start_time,
            last_death: start_time,
            branch_events: 0,
            envelope: Vec::new(),
        };
        if cfg.record_envelope {
            st.envelope.push((start_time, first));
        }
        let mut marks: Vec<f64> =
            cfg.checkpoints.iter().copied().filter(|&c| c >= start_time && c <= cfg.horizon).collect();
        marks.sort_by(f64::total_cmp);
        marks.dedup();
        let mut next_mark = 0;
        let mut checkpoints = Vec::with_capacity(marks.len());
        let mut s = start_time;
        let mut stopped_above = false;
        while next_mark < marks.len() && marks[next_mark] <= s {
            checkpoints.push(self.checkpoint(s, cfg));
            next_mark += 1;
        }
        while s < cfg.horizon && !self.pos.is_empty() {
            if cfg.stop_above.is_some_and(|lvl| st.record >= lvl) {
                stopped_above = true;
                break;
            }
            let mut end = (s + cfg.dt).min(cfg.horizon);
            if next_mark < marks.len() && marks[next_mark] < end {
                end = marks[next_mark];
            }
            self.interval(end, law, cfg, &mut st, rng)?;
            s = end;
            if cfg.record_envelope && !self.pos.is_empty() {
                st.envelope.push((s, self.pos.iter().copied().fold(f64::NEG_INFINITY, f64::max)));
            }
            while next_mark < marks.len() && marks[next_mark] <= s {
                checkpoints.push(self.checkpoint(marks[next_mark], cfg));
                next_mark += 1;
            }
        }
        if cfg.stop_above.is_some_and(|lvl| st.record >= lvl) {
            stopped_above = true;
        }
        let extinct = self.pos.is_empty();
        // Checkpoints after extinction are empty populations.
        if extinct {
            while next_mark < marks.len() {
                checkpoints.push(self.checkpoint(marks[next_mark], cfg));
                next_mark += 1;
            }
        }
        Ok(BbmRunResult {
            start_time,
            extinction_time: extinct.then_some(st.last_death),
            end_time: if extinct { st.last_death } else { s },
            stopped_above,
            all_time_max: st.record,
            argmax_time: st.argmax,
            max_envelope: st.envelope,
            checkpoints,
            branch_events: st.branch_events,
            final_positions: self.pos.clone(),
        })
    }

    /// Current particles with their labels (empty labels without genealogy).
    pub fn particles(&self) -> Vec<Particle> {
        (0..self.pos.len())
            .map(|i| Particle { label: self.label(self.node[i]), position: self.pos[i], born_at: self.born[i] })
            .collect()
    }

    fn label(&self, mut id: u32) -> Vec<u32> {
        let mut out = Vec::new();
        while id != 0 {
            let (parent, k) = self.tree[id as usize];
            out.push(k);
            id = parent;
        }
        out.reverse();
        out
    }

    fn clear(&mut self) {
        self.pos.clear();
        self.at.clear();
        self.clock.clear();
        self.born.clear();
        self.inside.clear();
        self.node.clear();
        self.tree.clear();
        self.tree.push((0, 0));
    }

    fn new_node(&mut self, parent: u32, k: u32) -> u32 {
        self.tree.push((parent, k));
        (self.tree.len() - 1) as u32
    }

    fn push(&mut self, x: f64, at: f64, clock: f64, inside: bool, node: u32) {
        self.pos.push(x);
        self.at.push(at);
        self.clock.push(clock);
        self.born.push(at);
        self.inside.push(inside);
        self.node.push(node);
    }

    fn checkpoint(&self, time: f64, cfg: &BbmConfig) -> Checkpoint {
        let (z, z_prime) = match cfg.barrier_horizon {
            Some(t) if time < t => {
                let mut z = 0.0;
                let mut zp = 0.0;
                for (&x, &ok) in self.pos.iter().zip(&self.inside) {
                    let term = z_term(x, time, t);
                    z += term;
                    if ok {
                        zp += term;
                    }
                }
                (Some(z), Some(zp))
            }
            _ => (None, None),
        };
        Checkpoint {
            time,
            population: self.pos.len(),
            max_position: self.pos.iter().copied().reduce(f64::max),
            v: self.pos.iter().map(|&x| x * x.exp()).sum(),
            sum_exp: self.pos.iter().map(|&x| x.exp()).sum(),
            z,
            z_prime,
            positions: cfg.record_positions.then(|| self.pos.clone()),
        }
    }

    fn interval<R: Rng + ?Sized>(
        &mut self,
        s1: f64,
        law: &OffspringLaw,
        cfg: &BbmConfig,
        st: &mut RunState,
        rng: &mut R,
    ) -> Result<(), BbmError> {
        let beta = law.beta();
        let c = critical_c();
        let mut i = 0;
        while i < self.pos.len() {
            let mut t = self.at[i];
            let mut x = self.pos[i];
            let mut alive = true;
            loop {
                let end = self.clock[i].min(s1);
                let h = end - t;
                if h > 0.0 {
                    let x1 = x - h + h.sqrt() * standard_normal(rng);
                    let q = 2.0 * x * x1 / h;
                    if x1 <= 0.0 || (q < NEGLIGIBLE_EXPONENT && open01(rng) < (-q).exp()) {
                        let hit = t + h * x / (x + x1.max(0.0));
                        st.last_death = st.last_death.max(hit);
                        alive = false;
                        break;
                    }
                    if cfg.track_maximum {
                        self.update_record(x, x1, t, h, st, cfg, rng);
                    }
                    if self.inside[i] {
                        if let Some(th) = cfg.barrier_horizon {
                            self.inside[i] = stays_below_barrier(x, x1, t, end, th, c, rng);
                        }
                    }
                    x = x1;
                    t = end;
                }
                if self.clock[i] > s1 {
                    break;
                }
                st.branch_events += 1;
                let k = law.sample(rng);
                if k == 0 {
                    st.last_death = st.last_death.max(end);
                    alive = false;
                    break;
                }
                let parent = self.node[i];
                for j in 1..k {
                    let id = if cfg.genealogy { self.new_node(parent, j as u32 + 1) } else { 0 };
                    let inside = self.inside[i];
                    self.push(x, end, end + exp_time(beta, rng), inside, id);
                }
                if cfg.genealogy {
                    self.node[i] = self.new_node(parent, 1);
                }
                self.clock[i] = end + exp_time(beta, rng);
                if self.pos.len() > cfg.population_cap {
                    return Err(BbmError::PopulationCap { cap: cfg.population_cap, time: end });
                }
            }
            if alive {
                self.pos[i] = x;
                self.at[i] = s1;
            } else {
                self.pos[i] = f64::NAN;
            }
            i += 1;
        }
        self.compact();
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    #[inline]
    fn update_record<R: Rng + ?Sized>(
        &self,
        x0: f64,
        x1: f64,
        t: f64,
        h: f64,
        st: &mut RunState,
        cfg: &BbmConfig,
        rng: &mut R,
    ) {
        let rec = st.record;
        let (d0, d1) = (rec - x0, rec - x1);
        if d0 > 0.0 && d1 > 0.0 && 2.0 * d0 * d1 / h > NEGLIGIBLE_EXPONENT {
            return;
        }
        let m = bridge_max(x0, x1, h, open01(rng));
        if m > rec {
            let (up, down) = (m - x0, m - x1);
            let when = if up + down > 0.0 { t + h * up / (up + down) } else { t };
            st.record = m;
            st.argmax = when;
            if cfg.record_envelope {
                st.envelope.push((when, m));
            }
        }
    }

    fn compact(&mut self) {
        let mut w = 0;
        for r in 0..self.pos.len() {
            if !self.pos[r].is_nan() {
                if w != r {
                    self.pos[w] = self.pos[r];
                    self.at[w] = self.at[r];
                    self.clock[w] = self.clock[r];
                    self.born[w] = self.born[r];
                    self.inside[w] = self.inside[r];
                    self.node[w] = self.node[r];
                }
                w += 1;
            }
        }
        self.pos.truncate(w);
        self.at.truncate(w);
        self.clock.truncate(w);
        self.born.truncate(w);
        self.inside.truncate(w);
        self.node.truncate(w);
    }
}

#[inline]
fn exp_time<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    -open01(rng).ln() / rate
}

/// Whether a segment from `(t0, x0)` to `(t1, x1)` stays below the barrier,
/// using the bridge crossing probability against its chord.
#[inline]
fn stays_below_barrier<R: Rng + ?Sized>(x0: f64, x1: f64, t0: f64, t1: f64, th: f64, c: f64, rng: &mut R) -> bool {
    if t1 >= th {
        return false;
    }
    let l0 = c * (th - t0).cbrt();
    let l1 = c * (th - t1).cbrt();
    if x0 > l0 || x1 > l1 {
        return false;
    }
    let q = 2.0 * (l0 - x0) * (l1 - x1) / (t1 - t0);
    q >= NEGLIGIBLE_EXPONENT || open01(rng) >= (-q).exp()
}

/// One run with a fresh engine.
pub fn simulate_bbm<R: Rng + ?Sized>(
    x: f64,
    law: &OffspringLaw,
    cfg: &BbmConfig,
    rng: &mut R,
) -> Result<BbmRunResult, BbmError> {
    BbmEngine::new().run(x, law, cfg, rng)
}
