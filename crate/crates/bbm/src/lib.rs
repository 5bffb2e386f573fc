//! Branching Brownian motion with drift −1, branching rate `β = 1/(2m)` and
//! absorption at 0.

mod engine;
mod functionals;
mod law;
pub mod max_law;
mod moments;
mod survival;

pub use engine::{simulate_bbm, BbmConfig, BbmEngine, BbmRunResult, Checkpoint, Particle};
pub use functionals::{barrier, critical_c, v_functional, z_functional, z_term};
pub use law::{OffspringLaw, DEFAULT_SUPPORT_CAP};
pub use max_law::{MaxLaw, SubtreeMaxTable};
pub use moments::{many_to_one_check, many_to_one_closed_form, ManyToOne};
pub use survival::{
    absorption_survival, conditional_survival, splitting_conditional_survival, survival_splitting,
    survival_splitting_repeats, ConditionalSurvival, SplittingEstimate, SplittingPlan, SplittingRatio, SurvivalPoint,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BbmError {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid offspring law: {0}")]
    InvalidLaw(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("population exceeded cap {cap} at time {time}")]
    PopulationCap { cap: usize, time: f64 },
    #[error("only {got} conditioning successes, {needed} required")]
    InsufficientSample { needed: usize, got: usize },
}
