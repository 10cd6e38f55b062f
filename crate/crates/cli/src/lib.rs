//! Configuration, scenario orchestration and file output for the `vmlab`
//! command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod oracle;
pub mod run;
pub mod scenario;

pub use config::ScenarioConfig;
pub use error::{CliError, Result};
pub use scenario::Scenario;
