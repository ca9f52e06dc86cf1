//! Experiment configs, batch execution, persistence and charts.

pub mod chart;
pub mod config;
pub mod report;
pub mod run;

pub use chart::{emit_chart, Band, ChartSpec};
pub use config::{Experiment, ExperimentConfig, Family};
pub use report::report;
pub use run::{run, RunRecord};

/// Satisfiability threshold of random 3-SAT, used to label regimes.
pub const ALPHA_C: f64 = 4.267;
