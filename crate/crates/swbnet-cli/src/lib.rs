//! Batch harness around the simulator: run replicated sessions for both
//! conditions, persist event logs, compute per-round trajectories and
//! condition summaries, evaluate the directional replication checklist,
//! and run mediation analyses, all deterministic from one master seed.

pub mod analyze;
pub mod config;
pub mod logfile;
pub mod mediate;
pub mod replicate;
pub mod report;
pub mod runner;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{file}:{line}: {message} (record: {record})")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
        record: String,
    },
    #[error("replication verdict failed: {0}")]
    Verdict(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> CliError {
        CliError::Config(message.into())
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// Process exit status: 1 config/input, 2 replication verdict, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Parse { .. } => 1,
            CliError::Verdict(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<swbnet::engine::EngineError> for CliError {
    fn from(err: swbnet::engine::EngineError) -> CliError {
        CliError::Config(err.to_string())
    }
}

impl From<swbnet::stats::StatsError> for CliError {
    fn from(err: swbnet::stats::StatsError) -> CliError {
        CliError::Config(err.to_string())
    }
}
