//! Experiment configuration: a JSON file, named presets and CLI overrides.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use moea_core::{
    Benchmark, Crossover, Mutation, NsgaConfig, SemoConfig, SemoMutation, SurvivalVariant, VariationConfig,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum BenchmarkId {
    #[serde(rename = "momm")]
    #[value(name = "momm")]
    Momm,
    #[serde(rename = "3omm")]
    #[value(name = "3omm")]
    ThreeOmm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmId {
    Nsga2,
    Semo,
    Gsemo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MutationId {
    OneBit,
    Bitwise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CrossoverId {
    Off,
    OnePoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SurvivalId {
    Original,
    Sequential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    PaperFig1,
    PaperFig2,
    PaperFig3,
    #[serde(rename = "paper-3omm")]
    #[value(name = "paper-3omm")]
    Paper3omm,
    PaperGsemo,
}

/// Everything that determines the outputs of an experiment.
///
/// Exactly one of `pop_mult` (population size as a multiple of the front
/// size `M`) and `pop_size` must be set for the NSGA-II. Repetition `r`
/// is seeded with `base_seed + r`. For SEMO/GSEMO the mutation operator is
/// implied by the algorithm and `iterations`, `pop_*`, `crossover` and
/// `survival` are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub benchmark: BenchmarkId,
    pub n: usize,
    /// Objective count; mOneMinMax only.
    pub m: Option<usize>,
    pub algorithm: AlgorithmId,
    pub pop_mult: Option<usize>,
    pub pop_size: Option<usize>,
    pub mutation: MutationId,
    pub crossover: CrossoverId,
    pub crossover_prob: f64,
    pub survival: SurvivalId,
    pub iterations: usize,
    pub max_evaluations: u64,
    pub repetitions: usize,
    pub base_seed: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            benchmark: BenchmarkId::Momm,
            n: 40,
            m: Some(4),
            algorithm: AlgorithmId::Nsga2,
            pop_mult: Some(4),
            pop_size: None,
            mutation: MutationId::Bitwise,
            crossover: CrossoverId::Off,
            crossover_prob: Crossover::DEFAULT_PROBABILITY,
            survival: SurvivalId::Original,
            iterations: 1000,
            max_evaluations: 500_000,
            repetitions: 10,
            base_seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let base = Self::default();
        match preset {
            // one exemplary run per population size
            Preset::PaperFig1 => Self { repetitions: 1, out: "out/fig1".into(), ..base },
            Preset::PaperFig2 => Self { out: "out/fig2".into(), ..base },
            Preset::PaperFig3 => Self { repetitions: 1, out: "out/fig3".into(), ..base },
            Preset::Paper3omm => Self {
                benchmark: BenchmarkId::ThreeOmm,
                m: None,
                pop_mult: Some(16),
                out: "out/3omm".into(),
                ..base
            },
            Preset::PaperGsemo => Self {
                algorithm: AlgorithmId::Gsemo,
                pop_mult: None,
                repetitions: 30,
                out: "out/gsemo".into(),
                ..base
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn benchmark(&self) -> Result<Benchmark> {
        let b = match self.benchmark {
            BenchmarkId::Momm => {
                let m = self.m.ok_or_else(|| HarnessError::Usage("benchmark momm needs --m".into()))?;
                Benchmark::momm(self.n, m)
            }
            BenchmarkId::ThreeOmm => {
                if self.m.is_some_and(|m| m != 3) {
                    return Err(HarnessError::Usage("benchmark 3omm has exactly 3 objectives".into()));
                }
                Benchmark::three_omm(self.n)
            }
        };
        b.map_err(|e| HarnessError::Usage(e.to_string()))
    }

    pub fn front_size(&self) -> Result<usize> {
        Ok(self.benchmark()?.front().size())
    }

    /// NSGA-II population size.
    pub fn population_size(&self) -> Result<usize> {
        match (self.pop_mult, self.pop_size) {
            (Some(_), Some(_)) => Err(HarnessError::Usage("set only one of pop_mult and pop_size".into())),
            (Some(0), _) | (_, Some(0)) => Err(HarnessError::Usage("population size must be positive".into())),
            (Some(k), None) => k
                .checked_mul(self.front_size()?)
                .ok_or_else(|| HarnessError::Usage("population size overflows".into())),
            (None, Some(n)) => Ok(n),
            (None, None) => Err(HarnessError::Usage("the NSGA-II needs pop_mult or pop_size".into())),
        }
    }

    pub fn variation(&self) -> VariationConfig {
        VariationConfig {
            mutation: match self.mutation {
                MutationId::OneBit => Mutation::OneBit,
                MutationId::Bitwise => Mutation::STANDARD,
            },
            crossover: match self.crossover {
                CrossoverId::Off => Crossover::Off,
                CrossoverId::OnePoint => Crossover::OnePoint { probability: self.crossover_prob },
            },
        }
    }

    pub fn seed(&self, repetition: usize) -> u64 {
        self.base_seed.wrapping_add(repetition as u64)
    }

    pub fn nsga_config(&self, repetition: usize) -> Result<NsgaConfig> {
        let cfg = NsgaConfig {
            benchmark: self.benchmark()?,
            population_size: self.population_size()?,
            variation: self.variation(),
            survival: match self.survival {
                SurvivalId::Original => SurvivalVariant::Original,
                SurvivalId::Sequential => SurvivalVariant::Sequential,
            },
            iterations: self.iterations,
            seed: self.seed(repetition),
        };
        cfg.validate().map_err(|e| HarnessError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn semo_config(&self, repetition: usize) -> Result<SemoConfig> {
        let mutation = match self.algorithm {
            AlgorithmId::Semo => SemoMutation::OneBit,
            AlgorithmId::Gsemo => SemoMutation::Standard,
            AlgorithmId::Nsga2 => return Err(HarnessError::Usage("not a SEMO-type algorithm".into())),
        };
        let cfg = SemoConfig {
            benchmark: self.benchmark()?,
            mutation,
            max_evaluations: self.max_evaluations,
            seed: self.seed(repetition),
        };
        cfg.validate().map_err(|e| HarnessError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    /// Checks everything a run needs, before any work starts.
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(HarnessError::Usage("repetitions must be positive".into()));
        }
        match self.algorithm {
            AlgorithmId::Nsga2 => self.nsga_config(0).map(|_| ()),
            AlgorithmId::Semo | AlgorithmId::Gsemo => self.semo_config(0).map(|_| ()),
        }
    }
}
