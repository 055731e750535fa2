//! Experiment runner on top of `adaptscale-core`: TOML configuration, the
//! policy matrix, the cold-start sweep, the adaptive-horizon A/B test, CSV
//! and JSON outputs, and a plain-text report.

pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod suite;

pub use config::ExperimentConfig;
pub use error::{LabError, Result};
