//! Experiment harness behind the `fourns` binary: config ingestion, the
//! four subcommands and their on-disk artifacts.

pub mod commands;
pub mod config;
pub mod output;
pub mod schema;

pub use commands::{build_initial, cmd_calc, cmd_lab, cmd_simulate, cmd_sweep_n, Artifacts};
pub use config::ExperimentConfig;

/// Output directory override.
pub const OUT_ENV: &str = "FOURNS_OUT";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(config::ConfigIssue),
    #[error("{0}")]
    Runtime(#[from] fourns_core::Error),
    #[error("io error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Runtime(_) | Self::Io { .. } => 1,
        }
    }
}
