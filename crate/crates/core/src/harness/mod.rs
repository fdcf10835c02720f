//! Replication runner, sensitivity sweep, proactive comparison and reports.

mod experiment;
mod report;

pub use experiment::{
    compare_experiments, run_outcomes, run_replications, sweep, Comparison, ModelComparison,
    ModelKind, Pairing, SweepSpec, SweepSpecError, INDEPENDENT_SEED_OFFSET,
};
pub use report::{
    emit_report, format_sig6, write_report, ExperimentReport, ReportFormat, ReportParseError,
    ReportRow,
};

use thiserror::Error;

use crate::config::ConfigError;
use crate::metrics::StatsError;
use crate::model::ModelError;
use crate::stats::MannWhitneyError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sweep(#[from] SweepSpecError),
    #[error("simulation failed: {0}")]
    Model(#[from] ModelError),
    #[error("summary failed: {0}")]
    Stats(#[from] StatsError),
    #[error("hypothesis test failed: {0}")]
    Test(#[from] MannWhitneyError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
