use crate::{Experiment, Statement};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// How an observed value is judged against its target and tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `observed < tolerance`.
    Below,
    /// `|observed − target| ≤ tolerance`.
    Within,
    /// `observed ≤ target + tolerance`.
    AtMost,
    /// A property that holds (`observed = 1`) or not (`observed = 0`).
    Holds,
    /// Reported without a pass/fail judgement.
    Report,
}

impl Rule {
    pub fn judge(self, observed: f64, target: f64, tolerance: f64) -> bool {
        match self {
            Rule::Below => observed < tolerance,
            Rule::Within => (observed - target).abs() <= tolerance,
            Rule::AtMost => observed <= target + tolerance,
            Rule::Holds => observed == 1.0,
            Rule::Report => true,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rule::Below => "<",
            Rule::Within => "±",
            Rule::AtMost => "≤",
            Rule::Holds => "holds",
            Rule::Report => "report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub statement: Statement,
    /// Unique within the experiment; thresholds are overridden by this name.
    pub name: String,
    pub rule: Rule,
    pub target: f64,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(
        statement: Statement,
        name: impl Into<String>,
        rule: Rule,
        target: f64,
        tolerance: f64,
        observed: f64,
    ) -> Self {
        Self {
            statement,
            name: name.into(),
            rule,
            target,
            tolerance,
            observed,
            pass: rule.judge(observed, target, tolerance),
        }
    }

    /// A KS-type distance that must stay below `threshold`.
    pub fn below(statement: Statement, name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Self::new(statement, name, Rule::Below, 0.0, threshold, observed)
    }

    pub fn within(statement: Statement, name: impl Into<String>, observed: f64, target: f64, tol: f64) -> Self {
        Self::new(statement, name, Rule::Within, target, tol, observed)
    }

    pub fn at_most(statement: Statement, name: impl Into<String>, observed: f64, bound: f64, slack: f64) -> Self {
        Self::new(statement, name, Rule::AtMost, bound, slack, observed)
    }

    pub fn holds(statement: Statement, name: impl Into<String>, ok: bool) -> Self {
        Self::new(statement, name, Rule::Holds, 1.0, 0.0, if ok { 1.0 } else { 0.0 })
    }

    pub fn report(statement: Statement, name: impl Into<String>, observed: f64) -> Self {
        Self::new(statement, name, Rule::Report, 0.0, 0.0, observed)
    }

    /// Replaces the tolerance and re-judges.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.rule.judge(self.observed, self.target, tolerance);
        self
    }
}

/// Row-major raw samples sharing one set of fields.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SampleGroup {
    pub name: String,
    pub fields: Vec<String>,
    pub values: Vec<f64>,
}

impl SampleGroup {
    pub fn new(name: impl Into<String>, fields: &[&str]) -> Self {
        Self { name: name.into(), fields: fields.iter().map(|f| f.to_string()).collect(), values: Vec::new() }
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.fields.len(), "sample row width");
        self.values.extend_from_slice(row);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.fields.len().max(1))
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.fields.len().max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Long-format plot data: `(series, x, y)` rows.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PlotTable {
    pub rows: Vec<(String, f64, f64)>,
}

impl PlotTable {
    pub fn push(&mut self, series: &str, x: f64, y: f64) {
        self.rows.push((series.to_string(), x, y));
    }

    /// Empirical and reference CDFs of `sample` on `points` evenly spaced
    /// sample quantiles.
    pub fn ecdf_pair(&mut self, series: &str, sample: &[f64], cdf: impl Fn(f64) -> f64, points: usize) {
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        if sorted.is_empty() {
            return;
        }
        let n = sorted.len();
        for k in 1..=points {
            let i = (k * n / (points + 1)).min(n - 1);
            let x = sorted[i];
            self.push(&format!("{series}:empirical"), x, (i + 1) as f64 / n as f64);
            self.push(&format!("{series}:reference"), x, cdf(x));
        }
    }
}

/// Everything an experiment produces.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub experiment: Experiment,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub samples: Vec<SampleGroup>,
    pub plot: PlotTable,
}

impl Outcome {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        Self {
            experiment,
            seed,
            params: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            samples: Vec::new(),
            plot: PlotTable::default(),
        }
    }

    pub fn param(&mut self, name: &str, value: f64) {
        self.params.insert(name.to_string(), value);
    }

    pub fn check(&mut self, c: Check) {
        debug_assert!(self.checks.iter().all(|k| k.name != c.name), "duplicate check {}", c.name);
        self.checks.push(c);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Applies tolerance overrides; unknown names are an error.
    pub fn apply_thresholds(&mut self, overrides: &BTreeMap<String, f64>) -> Result<(), String> {
        for (name, &tol) in overrides {
            let c = self
                .checks
                .iter_mut()
                .find(|c| &c.name == name)
                .ok_or_else(|| format!("threshold override for unknown check '{name}'"))?;
            *c = c.clone().with_tolerance(tol);
        }
        Ok(())
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn verdict(&self) -> Verdict {
        Verdict {
            experiment: self.experiment,
            seed: self.seed,
            pass: self.pass(),
            params: self.params.clone(),
            checks: self.checks.clone(),
            notes: self.notes.clone(),
        }
    }
}

/// The persisted summary of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub experiment: Experiment,
    pub seed: u64,
    pub pass: bool,
    pub params: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_judge_as_documented() {
        assert!(Rule::Below.judge(0.009, 0.0, 0.01));
        assert!(!Rule::Below.judge(0.01, 0.0, 0.01));
        assert!(Rule::Within.judge(1.049, 1.0, 0.05));
        assert!(!Rule::Within.judge(1.051, 1.0, 0.05));
        assert!(!Rule::Within.judge(0.9, 1.0, 0.05));
        assert!(Rule::AtMost.judge(0.06, 0.05, 0.02));
        assert!(!Rule::Holds.judge(0.0, 1.0, 0.0));
        assert!(Rule::Report.judge(f64::NAN, 0.0, 0.0));
    }

    #[test]
    fn overrides_rejudge_and_unknown_names_fail() {
        let mut o = Outcome::new(Experiment::TriangleModel, 1);
        o.check(Check::below(Statement::PoissonMinimum, "ks", 0.02, 0.01));
        assert!(!o.pass());
        o.apply_thresholds(&[("ks".to_string(), 0.05)].into_iter().collect()).unwrap();
        assert!(o.pass());
        assert!(o.apply_thresholds(&[("other".to_string(), 0.05)].into_iter().collect()).is_err());
    }
}
