//! Experiment driver: configuration, the reproduction runs (estimator
//! curves, SNR sweeps, Monte-Carlo checks, threshold designs), CSV output
//! and the self-validation suite behind the `bayesnr` binary.

mod config;
mod csv;
mod experiments;
mod validate;

use std::path::Path;

pub use config::{
    CurveSpec, ExperimentConfig, McSpec, ModeSpec, NoiseKind, NoiseSpec, QuantizerKind, QuantizerSpec, SignalKind, SignalSpec,
    SweepSpec,
};
pub use csv::{fmt_num, Cell, Table};
pub use experiments::{
    design_partition, mmse_for, run_curve, run_mc, run_sweep, run_thresholds, Perf, Sweep, SweepDesign, SweepPoint, Version,
};
pub use validate::{run_validate, CheckResult, ValidateOptions, ValidationReport};

/// Failures of a harness run, each tied to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl HarnessError {
    /// 1 for configuration and i/o problems, 2 for numerical failures,
    /// 3 for failed validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 1,
            HarnessError::Numerical(e) if !e.is_numerical() => 1,
            HarnessError::Numerical(_) => 2,
            HarnessError::Validation(_) => 3,
        }
    }
}

/// Writes `table` as `dir/name`, creating `dir` if needed.
pub fn write_table(dir: &Path, name: &str, table: &Table) -> Result<std::path::PathBuf, HarnessError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, table.to_csv())?;
    Ok(path)
}
