//! Algorithmic core for studying the NSGA-II on many-objective OneMinMax
//! problems.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`solution`]: bit strings, objective vectors, individuals and Pareto
//!   dominance.
//! - [`benchmarks`]: the m-objective OneMinMax family and 3-OneMinMax with
//!   dense Pareto-front indexing.
//! - [`ranking`]: non-dominated sorting into fronts.
//! - [`crowding`]: the classic crowding distance and its positive-count
//!   diagnostics.
//! - [`evolution`]: fair parent selection, mutation, crossover and the two
//!   survival-selection procedures.
//! - [`engines`]: the generational NSGA-II loop and the SEMO/GSEMO loop.
//! - [`metrics`]: front coverage, neighbourhoods and summary statistics.
//!
//! Every source of randomness is a [`rand_chacha::ChaCha8Rng`] seeded from a
//! 64-bit seed, so runs are reproducible within a build.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod benchmarks;
pub mod crowding;
pub mod engines;
pub mod error;
pub mod evolution;
pub mod metrics;
pub mod ranking;
pub mod solution;

pub use benchmarks::{Benchmark, MommBenchmark, ParetoFront, ThreeOmmBenchmark};
pub use crowding::{crowding_distance, positive_count_bound, positive_crowding_count, CrowdingAssignment};
pub use engines::{
    nsga2_run, semo_run, Control, IterationView, Nsga2, NsgaConfig, Observer, RunTrace, Semo,
    SemoConfig, SemoMutation, TraceRecord,
};
pub use error::{Error, Result};
pub use evolution::{Crossover, Mutation, SurvivalVariant, VariationConfig};
pub use metrics::{coverage, neighbors, summarize, CoverageCounter, SummaryStats};
pub use ranking::{critical_front_index, non_dominated_sort, FrontPartition};
pub use solution::{hamming_distance, strictly_dominates, weakly_dominates, BitString, Individual, ObjectiveVector};

/// The random number generator used by every engine.
pub type EngineRng = rand_chacha::ChaCha8Rng;
