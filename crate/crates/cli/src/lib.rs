//! Reproducible experiment runner for `qotto-core`.
//!
//! Every run writes `<kind>_seed<seed>_*.csv` record, histogram and table
//! files, a `<kind>_seed<seed>_summary.json` with the fits, and a
//! `<kind>_seed<seed>_manifest.json` embedding the resolved configuration.
//! Numerical files depend only on the configuration, not on the thread count.

pub mod config;
pub mod output;
pub mod run;

pub use config::{load_config, validate_config, ConfigReport, ExperimentConfig, ExperimentKind, Overrides};
pub use run::{run, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{0}")]
    Config(#[from] ConfigReport),
    #[error("run failed: {0}")]
    Runtime(#[from] qotto_core::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV output error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON output error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Runtime(_) => 3,
            Self::Io(_) | Self::Csv(_) | Self::Json(_) => 4,
        }
    }
}
