//! Repetition fan-out, population-size sweeps and scatter dumps.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use moea_core::{summarize, Control, IterationView, Nsga2, RunTrace, Semo, SummaryStats, TraceRecord};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{AlgorithmId, BenchmarkId, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::io::{create_dir, create_file, write_text, Summary, TraceWriter};

pub const SUMMARY_FILE: &str = "summary.txt";
pub const CONFIG_FILE: &str = "config.json";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SCATTER_FILE: &str = "scatter.csv";

pub fn trace_file_name(repetition: usize) -> String {
    format!("trace_{repetition:03}.csv")
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads for repetitions; `None` uses one per CPU.
    pub workers: Option<usize>,
}

fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(HarnessError::Usage("--workers must be positive".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map(|pool| pool.install(job))
            .map_err(|e| HarnessError::Usage(format!("cannot start {w} workers: {e}"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepetitionOutcome {
    pub repetition: usize,
    pub seed: u64,
    pub trace_path: PathBuf,
    pub last: TraceRecord,
    pub iterations_to_coverage: Option<u64>,
    pub evaluations_to_coverage: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub front_size: usize,
    pub population_size: Option<usize>,
    pub outcomes: Vec<RepetitionOutcome>,
    pub coverage_p: SummaryStats,
    pub coverage_r: SummaryStats,
    pub evaluations_to_coverage: Option<SummaryStats>,
    pub summary: Summary,
}

/// Runs one repetition, streaming its trace to `path`.
fn run_repetition(cfg: &ExperimentConfig, repetition: usize, path: &Path) -> Result<RepetitionOutcome> {
    let mut writer = TraceWriter::create(path)?;
    let mut failure = None;
    let observer = |view: &IterationView<'_>| match writer.write(view.record) {
        Ok(()) => Control::Continue,
        Err(e) => {
            failure = Some(e);
            Control::Stop
        }
    };
    let trace: RunTrace = match cfg.algorithm {
        AlgorithmId::Nsga2 => {
            let mut engine = Nsga2::new(cfg.nsga_config(repetition)?)?;
            engine.attach_observer(observer)?;
            engine.run()?;
            engine.into_parts().0
        }
        AlgorithmId::Semo | AlgorithmId::Gsemo => {
            let mut engine = Semo::new(cfg.semo_config(repetition)?)?;
            engine.attach_observer(observer)?;
            engine.run()?;
            engine.into_parts().0
        }
    };
    if let Some(e) = failure {
        return Err(e);
    }
    writer.finish()?;
    Ok(RepetitionOutcome {
        repetition,
        seed: cfg.seed(repetition),
        trace_path: path.to_path_buf(),
        last: *trace.last().expect("every run records its initial population"),
        iterations_to_coverage: trace.iterations_to_coverage,
        evaluations_to_coverage: trace.evaluations_to_coverage,
    })
}

fn push_stats(summary: &mut Summary, prefix: &str, s: &SummaryStats) {
    summary.push(&format!("{prefix}_mean"), s.mean);
    summary.push(&format!("{prefix}_std"), s.std);
    summary.push(&format!("{prefix}_min"), s.min);
    summary.push(&format!("{prefix}_max"), s.max);
}

/// Runs all repetitions of `cfg` and writes `trace_RRR.csv` files,
/// `summary.txt` and the effective `config.json` into `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentReport> {
    cfg.validate()?;
    let front_size = cfg.front_size()?;
    let population_size = match cfg.algorithm {
        AlgorithmId::Nsga2 => Some(cfg.population_size()?),
        _ => None,
    };
    create_dir(&cfg.out)?;
    let outcomes = in_pool(options.workers, || {
        (0..cfg.repetitions)
            .into_par_iter()
            .map(|r| run_repetition(cfg, r, &cfg.out.join(trace_file_name(r))))
            .collect::<Result<Vec<_>>>()
    })??;

    let finals = |f: fn(&TraceRecord) -> usize| outcomes.iter().map(|o| f(&o.last) as f64).collect::<Vec<_>>();
    let coverage_p = summarize(&finals(|r| r.coverage_p))?;
    let coverage_r = summarize(&finals(|r| r.coverage_r))?;
    let covered: Vec<f64> = outcomes.iter().filter_map(|o| o.evaluations_to_coverage).map(|e| e as f64).collect();
    let evaluations_to_coverage = match cfg.algorithm {
        AlgorithmId::Nsga2 => None,
        _ => summarize(&covered).ok(),
    };

    let mut summary = Summary::default();
    summary.push("algorithm", json_name(&cfg.algorithm));
    summary.push("benchmark", json_name(&cfg.benchmark));
    summary.push("n", cfg.n);
    summary.push("objectives", cfg.benchmark()?.objectives());
    summary.push("front_size", front_size);
    if let Some(n) = population_size {
        summary.push("population_size", n);
        summary.push("iterations", cfg.iterations);
    } else {
        summary.push("max_evaluations", cfg.max_evaluations);
    }
    summary.push("repetitions", cfg.repetitions);
    summary.push("seeds", format!("{}..={}", cfg.seed(0), cfg.seed(cfg.repetitions - 1)));
    push_stats(&mut summary, "final_coverage_P", &coverage_p);
    push_stats(&mut summary, "final_coverage_R", &coverage_r);
    if population_size.is_none() {
        summary.push("runs_covered", covered.len());
        if let Some(s) = &evaluations_to_coverage {
            push_stats(&mut summary, "evaluations_to_coverage", s);
            // one evaluation per iteration plus the initial individual
            summary.push("iterations_to_coverage_mean", s.mean - 1.0);
        }
    }
    summary.push("config", serde_json::to_string(cfg)?);
    write_text(&cfg.out.join(SUMMARY_FILE), &summary.render())?;
    write_text(&cfg.out.join(CONFIG_FILE), &(cfg.to_json() + "\n"))?;

    Ok(ExperimentReport {
        config: cfg.clone(),
        front_size,
        population_size,
        outcomes,
        coverage_p,
        coverage_r,
        evaluations_to_coverage,
        summary,
    })
}

fn json_name<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub multiplier: usize,
    pub population_size: usize,
    pub coverage_p: SummaryStats,
    pub coverage_r: SummaryStats,
}

pub const SWEEP_HEADER: &str = "multiplier,population_size,coverage_P_mean,coverage_P_std,coverage_R_mean,coverage_R_std";

/// Runs `cfg` once per population multiplier, each into `out/mult_K`, and
/// writes the aggregate `out/sweep.csv`.
pub fn run_sweep(cfg: &ExperimentConfig, multipliers: &[usize], options: &RunOptions) -> Result<Vec<SweepRow>> {
    if cfg.algorithm != AlgorithmId::Nsga2 {
        return Err(HarnessError::Usage("sweep varies the NSGA-II population size; use --algorithm nsga2".into()));
    }
    if multipliers.is_empty() {
        return Err(HarnessError::Usage("sweep needs at least one multiplier".into()));
    }
    let runs: Vec<ExperimentConfig> = multipliers
        .iter()
        .map(|&k| ExperimentConfig { pop_mult: Some(k), pop_size: None, out: cfg.out.join(format!("mult_{k}")), ..cfg.clone() })
        .collect();
    for r in &runs {
        r.validate()?;
    }
    let mut rows = Vec::new();
    for (run, &k) in runs.iter().zip(multipliers) {
        let report = run_experiment(run, options)?;
        rows.push(SweepRow {
            multiplier: k,
            population_size: report.population_size.expect("NSGA-II run"),
            coverage_p: report.coverage_p,
            coverage_r: report.coverage_r,
        });
    }
    let mut text = String::from(SWEEP_HEADER);
    text.push('\n');
    for r in &rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            r.multiplier, r.population_size, r.coverage_p.mean, r.coverage_p.std, r.coverage_r.mean, r.coverage_r.std
        );
    }
    create_dir(&cfg.out)?;
    write_text(&cfg.out.join(SWEEP_FILE), &text)?;
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScatterSet {
    R,
    PositiveCdis,
    PNext,
}

impl ScatterSet {
    pub fn label(&self) -> &'static str {
        match self {
            Self::R => "R",
            Self::PositiveCdis => "positive_cdis",
            Self::PNext => "P_next",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterDump {
    /// 1-based objective indices.
    pub coords: (usize, usize),
    pub iteration: usize,
    pub points: Vec<(u32, u32, ScatterSet)>,
}

impl ScatterDump {
    pub fn count(&self, set: ScatterSet) -> usize {
        self.points.iter().filter(|p| p.2 == set).count()
    }
}

/// Objective pair plotted by default: the ones counts `(f2, f4)` when there
/// are at least four objectives.
pub fn default_coords(cfg: &ExperimentConfig) -> (usize, usize) {
    match (cfg.benchmark, cfg.m) {
        (BenchmarkId::ThreeOmm, _) => (2, 3),
        (BenchmarkId::Momm, Some(m)) if m >= 4 => (2, 4),
        _ => (1, 2),
    }
}

/// Runs repetition 0 up to iteration `at` and dumps the chosen objective
/// pair of `R`, of its members with positive crowding distance and of the
/// selected next population to `out/scatter.csv`.
pub fn run_scatter(cfg: &ExperimentConfig, at: usize, coords: Option<(usize, usize)>) -> Result<ScatterDump> {
    cfg.validate()?;
    if cfg.algorithm != AlgorithmId::Nsga2 {
        return Err(HarnessError::Usage("scatter needs --algorithm nsga2".into()));
    }
    if at == 0 || at > cfg.iterations {
        return Err(HarnessError::Usage(format!("--at-iteration must be in 1..={}", cfg.iterations)));
    }
    let m = cfg.benchmark()?.objectives();
    let (a, b) = coords.unwrap_or_else(|| default_coords(cfg));
    if !(1..=m).contains(&a) || !(1..=m).contains(&b) {
        return Err(HarnessError::Usage(format!("coordinates must be in 1..={m}, got ({a},{b})")));
    }

    let mut points = Vec::new();
    {
        let observer = |view: &IterationView<'_>| {
            if view.iteration < at {
                return Control::Continue;
            }
            let pick = |o: &moea_core::ObjectiveVector| (o.get(a - 1), o.get(b - 1));
            let combined = view.combined.expect("NSGA-II views carry R");
            for ind in combined {
                let (x, y) = pick(ind.objectives());
                points.push((x, y, ScatterSet::R));
            }
            for ind in combined.iter().filter(|i| i.crowding() > 0.0) {
                let (x, y) = pick(ind.objectives());
                points.push((x, y, ScatterSet::PositiveCdis));
            }
            for ind in view.population {
                let (x, y) = pick(ind.objectives());
                points.push((x, y, ScatterSet::PNext));
            }
            Control::Stop
        };
        let mut engine = Nsga2::new(cfg.nsga_config(0)?)?;
        engine.attach_observer(observer)?;
        engine.run()?;
    }

    create_dir(&cfg.out)?;
    let path = cfg.out.join(SCATTER_FILE);
    let mut file = create_file(&path)?;
    let mut text = format!("f{a},f{b},set\n");
    for (x, y, set) in &points {
        let _ = writeln!(text, "{x},{y},{}", set.label());
    }
    file.write_all(text.as_bytes()).and_then(|_| file.flush()).map_err(|e| HarnessError::io(&path, e))?;
    Ok(ScatterDump { coords: (a, b), iteration: at, points })
}
