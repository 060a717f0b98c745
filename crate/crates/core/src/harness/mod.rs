//! Experiment driver: flat key=value configuration, seeded multi-run
//! execution, moving-average learning curves, CSV output and the exhaustive
//! single-rule analyzer.

mod analysis;
mod config;
mod experiment;

pub use analysis::{analyze_rule, InputAnalysis, RuleAnalysis, MAX_ANALYZED_INPUTS};
pub use config::{EnvSpec, ExperimentConfig, CONFIG_KEYS};
pub use experiment::{
    moving_average, run_experiment, run_seed, write_csv, write_outputs, ExperimentResult, MetricsRecord, CSV_HEADER,
};

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::envs::EnvError;
use crate::rbn::RbnError;
use crate::xcs::XcsError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {cause}")]
    ConfigSyntax { line: usize, cause: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {cause}")]
    BadValue { key: String, value: String, cause: String },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Xcs(#[from] XcsError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Rbn(#[from] RbnError),
}
