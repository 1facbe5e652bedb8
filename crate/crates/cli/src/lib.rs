//! Command-line front end for the waveguide spectral computations: reads a
//! TOML experiment configuration, runs one pipeline and writes `report.json`,
//! `summary.csv`, `plot.gp` and `fields/*.csv` to the output directory.
//!
//! Exit statuses: 0 success, 2 invalid configuration or inadmissible strip,
//! 3 eigensolver failure, 4 failed verification.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod verify;

pub use config::{ExperimentConfig, ExperimentKind, Overrides};
pub use error::CliError;
pub use pipeline::{run, RunSummary};
