//! Seeded experiment runner, result persistence, replay, and the regret bound.
//!
//! Trial `i` of an experiment uses seed `base_seed + i`. Its environment
//! draws come from ChaCha8 stream 0 of that seed and the agent's internal
//! randomness from stream 1, so changing the roster never perturbs the
//! environment.

mod bound;
mod config;
mod io;
mod run;

use crate::agents::AgentError;
use crate::mdp::MdpError;

pub use bound::theoretical_bound;
pub use config::{ExperimentConfig, DEFAULT_DELTA, DEFAULT_HORIZON, DEFAULT_TRIALS};
pub use io::{
    curves_csv, manifest_path, parse_curves_csv, replay, summary_csv, summary_path, write_outputs, CsvRow, Manifest,
    ManifestCell, ReplayReport, SummaryRow, CSV_HEADER,
};
pub use run::{
    checkpoint_times, run_experiment, run_trial, summarize, CellResult, ExperimentResult, RegretCurve, TrialOptions,
    TrialOutcome, TrialSetup,
};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed results: {0}")]
    Results(String),
}
