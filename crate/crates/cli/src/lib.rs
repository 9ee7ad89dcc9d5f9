//! Experiment harness around `layerwise-core`: config parsing, file formats,
//! and the seeded multi-run experiment driver behind the `layerwise` binary.
//!
//! - [`config`]: the flat `section.key = value` experiment configuration.
//! - [`experiment`]: the runner producing `curves.csv`, `summary.txt`, and
//!   serialized models.
//! - [`curves`], [`dataset_csv`], [`model_text`]: the text file formats, all
//!   round-tripping floats bit-exactly via [`num_fmt`].

pub mod config;
pub mod curves;
pub mod dataset_csv;
pub mod error;
pub mod experiment;
pub mod model_text;
pub mod num_fmt;

pub use config::{apply_overrides, parse_config, BudgetMode, ExperimentConfig, Overrides};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, ExperimentOutcome, RunEntry, RunOutcome};
