//! Command-line plumbing: file formats, preprocessing, configuration and the
//! end-to-end pipeline.

pub mod config;
pub mod io;
pub mod pipeline;
pub mod preprocess;

use std::fmt;

pub use config::{PipelineConfig, OUT_DIR_ENV};
pub use pipeline::{run_pipeline, PipelineReport};
pub use preprocess::{normalize_rate, preprocess_ma, truncate_to_dyadic};

use crate::error::Error;

/// Pipeline stage, used to tag failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Input,
    Features,
    Regression,
    Mixture,
    Selection,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Input => "input",
            Stage::Features => "features",
            Stage::Regression => "regression",
            Stage::Mixture => "mixture",
            Stage::Selection => "select-l",
            Stage::Output => "output",
        })
    }
}

/// An error together with the stage that raised it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("[{stage}] {source}")]
pub struct StageError {
    pub stage: Stage,
    pub source: Error,
}
