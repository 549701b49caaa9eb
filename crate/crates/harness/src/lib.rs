//! Experiment harness: configuration ingestion, seeded parallel Monte
//! Carlo orchestration, statistical verdicts, and persisted result tables.

pub mod config;
pub mod experiments;
pub mod table;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::run_experiment;
pub use table::{ResultRow, ResultTable, Verdict};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] lrdhom_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Re-export of the slope fit used across experiments, for downstream
/// plot tooling that wants the same convention.
pub use lrdhom_core::stats::fit_loglog_slope;
