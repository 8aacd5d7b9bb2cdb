//! Experiment harness: configuration, seeded corpora, sweeps over the
//! `varlab` operators, and CSV/JSON reports.

pub mod config;
pub mod corpus;
pub mod error;
pub mod experiments;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, Format};
pub use error::{HarnessError, Result};
pub use experiments::{run_experiment, EXPERIMENTS, FAMILIES};
pub use report::{ExperimentReport, Row, Status};
pub use stats::{estimate_constant, ConstantSummary};
