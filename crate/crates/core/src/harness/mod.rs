//! Experiment driver: JSON scenario configs, parameter sweeps and
//! deterministic CSV/JSON tables.

mod config;
mod experiments;
mod table;

pub use config::{
    load_config, parse_config, CountingParams, ErrorGrid, Experiment, MultipletParams,
    OutputFormat, OutputSpec, SimplifyParams, SpinSystemRef, SweepSpec, SCHEMA_VERSION,
};
pub use experiments::{
    counting_sweep, coupling_multiplet, excitation_amplitude, excitation_profile, fidelity_sweep,
    run_experiment, run_sweep, simplify_demo, SimplifyReport, SimplifyVariant,
};
pub use table::{format_float, Table, Value};

use std::path::PathBuf;

use thiserror::Error;

/// Environment variable that redirects relative output paths.
pub const OUT_DIR_ENV: &str = "ROBUST_GATES_OUT_DIR";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    ConfigSyntax(String),
    #[error("invalid config field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed table: {0}")]
    Table(String),
    #[error(transparent)]
    Simulation(#[from] crate::Error),
}

impl HarnessError {
    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for problems with the user's input rather than the environment.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Self::ConfigSyntax(_) | Self::InvalidField { .. } | Self::Simulation(_)
        )
    }
}
