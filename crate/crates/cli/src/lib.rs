//! Command-line front end for `framelab-core`.

pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_config, serialize_spec, ConfigError};
pub use report::{write_report, Format, Report};
pub use run::{dispatch, execute, Command, ExitStatus, Outcome, PresetName, RunConfig, RunError};
