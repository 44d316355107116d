//! Scenario runner for the `lpbm` verification toolkit.

pub mod catalog;
pub mod config;
pub mod curve;
pub mod error;
pub mod run;

pub use config::ScenarioConfig;
pub use error::CliError;
