//! Experiment harness for `banditconf`: JSON experiment configs, seeded
//! parallel Monte Carlo, and CSV/JSON result tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

pub use cli::run_cli;
pub use config::{ExperimentConfig, ExperimentKind};
pub use error::CliError;
pub use experiments::run_experiment;
pub use table::{Cell, ResultTable};
