//! Library side of the `sqs` command-line tool.
//!
//! Every subcommand is a plain function taking its parsed arguments, so the
//! binary, the integration tests and the acceptance suite share one code path.

pub mod commands;
pub mod config;
pub mod report;

use sqs_core::SqsError;
use thiserror::Error;

pub use commands::{
    evaluate, gen_data, generalization_bench, preprocess, report_cmd, scaling_bench, search, EvaluateArgs, GenDataArgs,
    GeneralizationArgs, PreprocessArgs, ReportArgs, ScalingArgs, SearchArgs,
};
pub use config::{Baseline, KernelSpec, Overrides, RunConfig};
pub use report::{BenchmarkReport, ModelRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] SqsError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numeric() => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
