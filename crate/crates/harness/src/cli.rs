use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use moea_core::crowding_distance;

use crate::config::{AlgorithmId, BenchmarkId, CrossoverId, ExperimentConfig, MutationId, Preset, SurvivalId};
use crate::error::{HarnessError, Result};
use crate::experiment::{run_experiment, run_scatter, run_sweep, RunOptions, SWEEP_HEADER};
use crate::io::parse_vectors;
use crate::verify::{faulty_crowding, library_crowding, run_verify_with, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "moea", version, about = "NSGA-II and SEMO/GSEMO experiments on the OneMinMax family")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run repetitions and write per-repetition traces plus a summary.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the NSGA-II for several population multipliers.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', default_value = "4,16,64,256")]
        multipliers: Vec<usize>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Dump two objectives of R, its positive-distance members and the next
    /// population at one iteration.
    Scatter {
        #[command(flatten)]
        config: ConfigArgs,
        /// Defaults to the last iteration.
        #[arg(long)]
        at_iteration: Option<usize>,
        /// 1-based objective pair, e.g. `2,4`.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        coords: Option<Vec<usize>>,
    },
    /// Run the self-check suite, or print crowding distances of a vector file.
    Verify {
        /// One comma-separated objective vector per line.
        #[arg(long)]
        vectors: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Swap in a crowding distance with broken normalization.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Debug, Default, Args)]
pub struct ConfigArgs {
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum)]
    pub benchmark: Option<BenchmarkId>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmId>,
    #[arg(long, conflicts_with = "pop_size")]
    pub pop_mult: Option<usize>,
    #[arg(long)]
    pub pop_size: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub max_evals: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub survival: Option<SurvivalId>,
    #[arg(long, value_enum)]
    pub mutation: Option<MutationId>,
    #[arg(long, value_enum)]
    pub crossover: Option<CrossoverId>,
    #[arg(long)]
    pub crossover_prob: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ConfigArgs {
    /// Preset or config file (or defaults), then flag overrides.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(p)) => ExperimentConfig::preset(p),
            (None, None) => ExperimentConfig::default(),
        };
        if let Some(b) = self.benchmark {
            cfg.benchmark = b;
            if b == BenchmarkId::ThreeOmm && self.m.is_none() {
                cfg.m = None;
            }
        }
        if let Some(m) = self.m {
            cfg.m = Some(m);
        }
        if let Some(k) = self.pop_mult {
            cfg.pop_mult = Some(k);
            cfg.pop_size = None;
        }
        if let Some(n) = self.pop_size {
            cfg.pop_size = Some(n);
            cfg.pop_mult = None;
        }
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {$(
                if let Some(v) = self.$flag.clone() {
                    cfg.$field = v;
                }
            )*};
        }
        set!(n => n, algorithm => algorithm, iters => iterations, max_evals => max_evaluations,
             reps => repetitions, seed => base_seed, survival => survival, mutation => mutation,
             crossover => crossover, crossover_prob => crossover_prob, out => out);
        Ok(cfg)
    }
}

/// Runs a parsed command, writing human-readable output to `out`.
/// Returns the process exit status.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let w = |e: std::io::Error| HarnessError::io("<stdout>", e);
    match cli.command {
        Command::Run { config, workers } => {
            let cfg = config.resolve()?;
            let report = run_experiment(&cfg, &RunOptions { workers })?;
            write!(out, "{}", report.summary.render()).map_err(w)?;
        }
        Command::Sweep { config, multipliers, workers } => {
            let cfg = config.resolve()?;
            let rows = run_sweep(&cfg, &multipliers, &RunOptions { workers })?;
            writeln!(out, "{SWEEP_HEADER}").map_err(w)?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.multiplier, r.population_size, r.coverage_p.mean, r.coverage_p.std, r.coverage_r.mean, r.coverage_r.std
                )
                .map_err(w)?;
            }
        }
        Command::Scatter { config, at_iteration, coords } => {
            let cfg = config.resolve()?;
            let coords = coords.map(|c| (c[0], c[1]));
            let dump = run_scatter(&cfg, at_iteration.unwrap_or(cfg.iterations), coords)?;
            use crate::experiment::ScatterSet::*;
            writeln!(
                out,
                "iteration {}: R {} rows, positive_cdis {} rows, P_next {} rows -> {}",
                dump.iteration,
                dump.count(R),
                dump.count(PositiveCdis),
                dump.count(PNext),
                cfg.out.join(crate::experiment::SCATTER_FILE).display()
            )
            .map_err(w)?;
        }
        Command::Verify { vectors: Some(path), .. } => {
            let text = fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
            let set = parse_vectors(&text)?;
            let a = crowding_distance(&set, set[0].len())?;
            for (v, d) in set.iter().zip(a.distances()) {
                writeln!(out, "{v}\t{d}").map_err(w)?;
            }
            writeln!(out, "positive: {}", a.positive_count()).map_err(w)?;
        }
        Command::Verify { vectors: None, seed, inject_fault } => {
            let crowding = if inject_fault { faulty_crowding } else { library_crowding };
            let report = run_verify_with(crowding, &VerifyOptions { seed, ..Default::default() });
            writeln!(out, "{report}").map_err(w)?;
            return Ok(if report.passed() { 0 } else { 1 });
        }
    }
    Ok(0)
}
