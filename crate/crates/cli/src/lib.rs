//! Experiment harness: TOML-configured spectral computations, wedge predictions, direct
//! solver comparisons and α → 1 matching reports.

pub mod commands;
pub mod config;
pub mod records;

pub use commands::{cmd_compare, cmd_match, cmd_predict, cmd_scatter, load_or_scatter};
pub use config::ExperimentConfig;
pub use records::ComparisonRecord;
