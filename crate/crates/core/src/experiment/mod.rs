//! Configured experiments: single gates, detuning and noise sweeps, and the
//! model checks, with CSV output and re-runnable manifests.

pub mod config;
pub mod output;
pub mod runners;
pub mod units;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, ExperimentKind, NoiseSettings, Physics, Resolved, Scale};
pub use output::{manifest_path, to_csv, write_atomic, LambdaRecord, Manifest, OracleRecord, Record, SweepRecord};
pub use runners::{
    lambda_point, noise_grid, oracle_phases, run_gate, run_intensity_sweep, run_lambda_check, run_oracle_check,
    run_scatter_sweep, simulate_gate, GateOutcome, LambdaSetup, NoisyGate,
};
pub use units::{FreqUnit, Frequency};

use crate::error::Result;

/// Rows produced by an experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Sweep(Vec<SweepRecord>),
    Lambda(Vec<LambdaRecord>),
    Oracle(Vec<OracleRecord>),
}

impl Outcome {
    pub fn to_csv(&self) -> String {
        match self {
            Outcome::Sweep(r) => to_csv(r),
            Outcome::Lambda(r) => to_csv(r),
            Outcome::Oracle(r) => to_csv(r),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Outcome::Sweep(r) => r.len(),
            Outcome::Lambda(r) => r.len(),
            Outcome::Oracle(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    Ok(match config.experiment {
        ExperimentKind::Gate => Outcome::Sweep(run_gate(config)?),
        ExperimentKind::ScatterSweep => Outcome::Sweep(run_scatter_sweep(config)?),
        ExperimentKind::IntensitySweep => Outcome::Sweep(run_intensity_sweep(config)?),
        ExperimentKind::LambdaCheck => Outcome::Lambda(run_lambda_check(config)?),
        ExperimentKind::OracleCheck => Outcome::Oracle(run_oracle_check(config)?),
    })
}

/// Writes the CSV and its manifest atomically; returns the manifest path.
pub fn write_outcome(config: &ExperimentConfig, outcome: &Outcome, csv: &Path) -> Result<PathBuf> {
    write_atomic(csv, &outcome.to_csv())?;
    let mut recorded = config.clone();
    recorded.output = Some(csv.to_string_lossy().into_owned());
    let manifest = Manifest::new(&recorded, csv, outcome.len());
    let path = manifest_path(csv);
    write_atomic(&path, &serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}
