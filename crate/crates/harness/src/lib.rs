//! Experiment runner, file formats and command line for `moea-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod oracles;
pub mod verify;

pub use config::{AlgorithmId, BenchmarkId, CrossoverId, ExperimentConfig, MutationId, Preset, SurvivalId};
pub use error::{HarnessError, Result};
pub use experiment::{
    run_experiment, run_scatter, run_sweep, ExperimentReport, RunOptions, ScatterDump, ScatterSet, SweepRow,
};
pub use verify::{run_verify, run_verify_with, VerifyOptions, VerifyReport};
