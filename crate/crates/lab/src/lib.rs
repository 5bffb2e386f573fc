//! Experiment registry, runner and report builder.
//!
//! Each registered experiment draws from streams derived from one seed,
//! evaluates its checks, and persists three files: raw samples as JSON
//! lines, a JSON verdict and long-format CSV plot data.

pub mod config;
mod error;
pub mod experiments;
pub mod output;
pub mod registry;
pub mod report;
pub mod verdict;

pub use config::{ExperimentConfig, FileConfig, Overrides};
pub use error::{exit, LabError};
pub use experiments::run_experiment;
pub use output::write_outcome;
pub use registry::{Experiment, Statement, MANIFEST};
pub use report::{build_report, Report, ReportRow, RowStatus};
pub use verdict::{Check, Outcome, PlotTable, Rule, SampleGroup, Verdict};
