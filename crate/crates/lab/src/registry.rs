use serde::{Deserialize, Serialize};
use std::fmt;

/// Registered experiments. The kebab-case names are the command-line
/// interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "taboo-validate")]
    TabooValidate,
    #[serde(rename = "excursion-validate")]
    ExcursionValidate,
    #[serde(rename = "triangle-model")]
    TriangleModel,
    #[serde(rename = "lemma5-min")]
    DriftedMinimum,
    #[serde(rename = "bbm-survival")]
    BbmSurvival,
    #[serde(rename = "martingale-check")]
    MartingaleCheck,
    #[serde(rename = "many-to-one")]
    ManyToOne,
    #[serde(rename = "lemma4-conditional")]
    ConditionalSurvival,
    #[serde(rename = "spine-theorem1")]
    SpineMaximum,
    #[serde(rename = "spine-gap")]
    SpineGap,
    #[serde(rename = "prop3-diagnostic")]
    SpineProximity,
}

/// Default scale of an experiment; flags and config files override it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Defaults {
    pub replicas: usize,
    pub t: Option<f64>,
    pub gamma: Option<f64>,
    pub x: Option<f64>,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::TabooValidate,
        Experiment::ExcursionValidate,
        Experiment::TriangleModel,
        Experiment::DriftedMinimum,
        Experiment::BbmSurvival,
        Experiment::MartingaleCheck,
        Experiment::ManyToOne,
        Experiment::ConditionalSurvival,
        Experiment::SpineMaximum,
        Experiment::SpineGap,
        Experiment::SpineProximity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::TabooValidate => "taboo-validate",
            Experiment::ExcursionValidate => "excursion-validate",
            Experiment::TriangleModel => "triangle-model",
            Experiment::DriftedMinimum => "lemma5-min",
            Experiment::BbmSurvival => "bbm-survival",
            Experiment::MartingaleCheck => "martingale-check",
            Experiment::ManyToOne => "many-to-one",
            Experiment::ConditionalSurvival => "lemma4-conditional",
            Experiment::SpineMaximum => "spine-theorem1",
            Experiment::SpineGap => "spine-gap",
            Experiment::SpineProximity => "prop3-diagnostic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    pub fn summary(self) -> &'static str {
        match self {
            Experiment::TabooValidate => "Euler taboo paths vs the spectral sampler; occupation law; local time rate",
            Experiment::ExcursionValidate => "excursion-measure closed forms; simulated excursion intensity",
            Experiment::TriangleModel => "minimum of the homogeneous Poisson process against (R~, 2UR~)",
            Experiment::DriftedMinimum => "drifted taboo minimum against (R~, UR~) along a gamma grid",
            Experiment::BbmSurvival => "survival probabilities by splitting; exponent regression",
            Experiment::MartingaleCheck => "martingale V(s); tail of the all-time maximum; Z' <= Z",
            Experiment::ManyToOne => "Monte Carlo sum of e^X against its closed form",
            Experiment::ConditionalSurvival => "conditional survival past t + v t^(2/3) along a t grid",
            Experiment::SpineMaximum => "rescaled all-time maximum and argmax of the spine process",
            Experiment::SpineGap => "gap between the spine maximum and the population maximum",
            Experiment::SpineProximity => "conditioned BBM vs spine process at early times",
        }
    }

    pub fn defaults(self) -> Defaults {
        let d = |replicas, t, gamma, x| Defaults { replicas, t, gamma, x };
        match self {
            Experiment::TabooValidate => d(100_000, Some(1e4), None, Some(0.3)),
            Experiment::ExcursionValidate => d(1, Some(1e4), None, None),
            Experiment::TriangleModel => d(1_000_000, None, None, None),
            Experiment::DriftedMinimum => d(10_000, None, Some(1e-4), None),
            Experiment::BbmSurvival => d(2000, Some(200.0), None, Some(1.0)),
            Experiment::MartingaleCheck => d(100_000, None, None, Some(1.0)),
            Experiment::ManyToOne => d(100_000, Some(1.0), None, Some(1.0)),
            Experiment::ConditionalSurvival => d(1000, Some(100.0), None, Some(3.0)),
            Experiment::SpineMaximum => d(1000, Some(1e6), None, None),
            Experiment::SpineGap => d(1000, Some(1e6), None, None),
            Experiment::SpineProximity => d(10_000, Some(50.0), None, Some(3.0)),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Mathematical statements under test, each owned by one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statement {
    TabooProcess,
    LocalTimeRate,
    ExcursionMeasure,
    PoissonMinimum,
    DriftedTabooMinimum,
    SurvivalAsymptotic,
    SurvivalBound,
    ConditionalSurvival,
    MartingaleBound,
    BarrierFunctionals,
    ManyToOne,
    TimeGeometry,
    MaximumLimitLaw,
    SpineConstruction,
    SpineProximity,
}

impl Statement {
    pub const ALL: [Statement; 15] = [
        Statement::TabooProcess,
        Statement::LocalTimeRate,
        Statement::ExcursionMeasure,
        Statement::PoissonMinimum,
        Statement::DriftedTabooMinimum,
        Statement::SurvivalAsymptotic,
        Statement::SurvivalBound,
        Statement::ConditionalSurvival,
        Statement::MartingaleBound,
        Statement::BarrierFunctionals,
        Statement::ManyToOne,
        Statement::TimeGeometry,
        Statement::MaximumLimitLaw,
        Statement::SpineConstruction,
        Statement::SpineProximity,
    ];

    pub fn title(self) -> &'static str {
        match self {
            Statement::TabooProcess => "Taboo process: transition law and stationary density 2sin^2(pi y)",
            Statement::LocalTimeRate => "Local time at 1/2 grows like 2s",
            Statement::ExcursionMeasure => "Excursion measure: nu((0,d)) = (pi/2)tan(pi d), density limit pi^2/2",
            Statement::PoissonMinimum => "Poisson minimum: (M0, v0*) = (R~, 2UR~) in law",
            Statement::DriftedTabooMinimum => "Drifted taboo minimum converges to (R~, UR~)",
            Statement::SurvivalAsymptotic => "Survival asymptotic: -log P(zeta > t) ~ c t^(1/3)",
            Statement::SurvivalBound => "Survival bound: P(zeta > t) <= C L sin(pi x/L) e^(x-L)",
            Statement::ConditionalSurvival => "Conditional survival: P(zeta > t + v t^(2/3) | zeta > t) -> e^(-cv/3)",
            Statement::MartingaleBound => "V(s) is a martingale and P(sup M >= x + a) <= e^(-a)",
            Statement::BarrierFunctionals => "Barrier functionals: Z' <= Z",
            Statement::ManyToOne => "Many-to-one: E[sum e^X(s)] = e^x (2 Phi(x/sqrt s) - 1)",
            Statement::TimeGeometry => "Time change: tau, tau^-1 and their small-time asymptotics",
            Statement::MaximumLimitLaw => "All-time maximum: (c^(1/2) R, 3 c^(-1/2) U R) limit",
            Statement::SpineConstruction => "Spine vs population maxima: gaps vanish under rescaling",
            Statement::SpineProximity => "Conditioned process is close to the spine process at early times",
        }
    }
}

/// Which experiment verifies each statement.
pub const MANIFEST: [(Statement, Experiment); 15] = [
    (Statement::TabooProcess, Experiment::TabooValidate),
    (Statement::LocalTimeRate, Experiment::TabooValidate),
    (Statement::ExcursionMeasure, Experiment::ExcursionValidate),
    (Statement::PoissonMinimum, Experiment::TriangleModel),
    (Statement::DriftedTabooMinimum, Experiment::DriftedMinimum),
    (Statement::SurvivalAsymptotic, Experiment::BbmSurvival),
    (Statement::SurvivalBound, Experiment::BbmSurvival),
    (Statement::ConditionalSurvival, Experiment::ConditionalSurvival),
    (Statement::MartingaleBound, Experiment::MartingaleCheck),
    (Statement::BarrierFunctionals, Experiment::MartingaleCheck),
    (Statement::ManyToOne, Experiment::ManyToOne),
    (Statement::TimeGeometry, Experiment::SpineMaximum),
    (Statement::MaximumLimitLaw, Experiment::SpineMaximum),
    (Statement::SpineConstruction, Experiment::SpineGap),
    (Statement::SpineProximity, Experiment::SpineProximity),
];

pub fn owner(statement: Statement) -> Experiment {
    MANIFEST.iter().find(|(s, _)| *s == statement).map(|(_, e)| *e).expect("every statement is in the manifest")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn names_round_trip_and_match_serde() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_name(e.name()), Some(e));
            assert_eq!(serde_json::to_string(&e).unwrap(), format!("\"{}\"", e.name()));
        }
        assert_eq!(Experiment::from_name("no-such-experiment"), None);
    }

    #[test]
    fn manifest_covers_statements_and_experiments_once() {
        let statements: Vec<Statement> = MANIFEST.iter().map(|m| m.0).collect();
        let unique: BTreeSet<Statement> = statements.iter().copied().collect();
        assert_eq!(unique.len(), statements.len(), "a statement has two owners");
        assert_eq!(unique, Statement::ALL.into_iter().collect(), "a statement has no owner");
        let covered: BTreeSet<Experiment> = MANIFEST.iter().map(|m| m.1).collect();
        assert_eq!(covered, Experiment::ALL.into_iter().collect());
    }
}
