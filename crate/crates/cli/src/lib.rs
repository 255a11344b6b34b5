//! Experiment runner for the `lkpz` solver: configuration files, presets,
//! sweeps and reports.

pub mod config;
pub mod error;
pub mod execute;
pub mod initial;
pub mod kernel;
pub mod presets;
pub mod report;
pub mod sweep;

pub use config::{parse_config, ExperimentConfig, Preset};
pub use error::{CliError, CliResult};
pub use execute::{execute, Execution};
pub use report::{Check, Report, Verdict};
