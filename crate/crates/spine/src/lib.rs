//! Branching Brownian motion with a distinguished spine particle.
//!
//! The spine follows `L_t(s)·K_{τ(s)}` for a taboo process `K` run on the
//! clock `τ`, branches at rate `(m+1)β` with size-biased offspring counts,
//! and sheds independent copies of the absorbed process. Internally the
//! clock path is `J = 1 − K`, which has the same law and makes
//! `(L_t − X̃_ξ)/L_t = b(r)J_r + d(r)` an identity on every path.

mod diagnostic;
mod geometry;
mod run;

pub use diagnostic::{
    compare_arms, sample_arm, spine_comparison_diagnostic, Arm, ArmDraws, ComparisonPlan, ComparisonReport,
    ComparisonRow, Snapshot,
};
pub use geometry::TimeGeometry;
pub use run::{
    simulate_spine_run, spine_only_path, spine_only_statistics, spine_problem, spine_vs_population_gap, BranchEvent,
    RescaledMaxima, SpineCheckpoint, SpineConfig, SpineRun, SpineSimulator, SubtreeMode, SubtreeOutcome,
};

#[derive(Debug, thiserror::Error)]
pub enum SpineError {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("needed {needed} conditioned runs, got {got}")]
    InsufficientSample { needed: usize, got: usize },
    #[error(transparent)]
    Engine(#[from] bbm_engine::BbmError),
    #[error(transparent)]
    Excursion(#[from] excursion_ppp::ExcursionError),
    #[error(transparent)]
    Taboo(#[from] taboo_diffusion::TabooError),
}
