//! Config-driven runner for the orthosim experiments.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod experiments;
pub mod verify;

pub use artifacts::{Manifest, MANIFEST_NAME};
pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
pub use experiments::{run, RunOutcome};
