//! Command implementations behind the `rankpc` binary.

pub mod config;
pub mod experiment;
pub mod oracle_check;
pub mod plotdata;
pub mod simulation;

pub use config::{ConfigError, ExperimentConfig};
pub use experiment::{run_experiment, summarize, ExperimentOutput, ExperimentRecord, SummaryRow};
pub use oracle_check::{oracle_check, OracleReport};
