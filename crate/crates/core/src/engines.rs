//! The generational NSGA-II loop and the steady-state SEMO/GSEMO loop.
//!
//! Both engines emit one [`TraceRecord`] for the initial population
//! (iteration 0) and one per iteration after it, and call every attached
//! [`Observer`] after each record.
//!
//! For the NSGA-II, record `t >= 1` describes the `t`-th generation: the
//! combined population `R` it ranked and the parent population it selected.
//! The iteration-0 record has no combined population; its `coverage_r`
//! equals `coverage_p` and its `positive_cdis` is zero.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};

use crate::benchmarks::{Benchmark, ParetoFront};
use crate::error::{Error, Result};
use crate::evolution::{generate_offspring, survival_select, Crossover, Mutation, SurvivalVariant, VariationConfig};
use crate::metrics::CoverageCounter;
use crate::solution::{strictly_dominates_slice, weakly_dominates_slice, BitString, Individual};
use crate::EngineRng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NsgaConfig {
    pub benchmark: Benchmark,
    pub population_size: usize,
    pub variation: VariationConfig,
    pub survival: SurvivalVariant,
    pub iterations: usize,
    pub seed: u64,
}

impl NsgaConfig {
    /// The setting used throughout the experiments: fair selection,
    /// standard bit-wise mutation, no crossover, original survival.
    pub fn standard(benchmark: Benchmark, population_size: usize, iterations: usize, seed: u64) -> Self {
        Self {
            benchmark,
            population_size,
            variation: VariationConfig::mutation_only(),
            survival: SurvivalVariant::Original,
            iterations,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.variation.validate()?;
        if self.population_size == 0 {
            return Err(Error::Config("population size must be positive".into()));
        }
        if let Crossover::OnePoint { .. } = self.variation.crossover {
            if self.population_size < 2 || !self.population_size.is_multiple_of(2) {
                return Err(Error::Config(format!(
                    "crossover pairs parents, so the population size must be even and >= 2 (got {})",
                    self.population_size
                )));
            }
        }
        if self.iterations == 0 {
            return Err(Error::Config("iteration count must be positive".into()));
        }
        Ok(())
    }
}

/// SEMO uses one-bit mutation, GSEMO standard bit-wise mutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SemoMutation {
    OneBit,
    Standard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SemoConfig {
    pub benchmark: Benchmark,
    pub mutation: SemoMutation,
    /// Budget of fitness evaluations, the initial individual included.
    pub max_evaluations: u64,
    pub seed: u64,
}

impl SemoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_evaluations == 0 {
            return Err(Error::Config("evaluation budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Distinct front points covered by the parent population.
    pub coverage_p: usize,
    /// Distinct front points covered by the combined population.
    pub coverage_r: usize,
    /// Members of the ranked fronts with positive crowding distance.
    pub positive_cdis: usize,
    /// Cumulative fitness evaluations.
    pub evaluations: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    /// SEMO/GSEMO: iterations until the whole front was covered.
    pub iterations_to_coverage: Option<u64>,
    /// SEMO/GSEMO: evaluations until the whole front was covered.
    pub evaluations_to_coverage: Option<u64>,
}

impl RunTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn evaluations(&self) -> u64 {
        self.last().map_or(0, |r| r.evaluations)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Read-only state handed to observers after each iteration.
#[derive(Debug)]
pub struct IterationView<'a> {
    pub iteration: usize,
    pub record: &'a TraceRecord,
    /// NSGA-II: the parent population `P_t` of this generation.
    pub previous: Option<&'a [Individual]>,
    /// NSGA-II: the combined population `R_t`, with the crowding distances
    /// used by the selection.
    pub combined: Option<&'a [Individual]>,
    /// The population after the iteration.
    pub population: &'a [Individual],
}

pub trait Observer {
    fn observe(&mut self, view: &IterationView<'_>) -> Control;
}

impl<F: FnMut(&IterationView<'_>) -> Control> Observer for F {
    fn observe(&mut self, view: &IterationView<'_>) -> Control {
        self(view)
    }
}

fn notify(observers: &mut [Box<dyn Observer + '_>], view: &IterationView<'_>) -> Control {
    let mut control = Control::Continue;
    for obs in observers.iter_mut() {
        if obs.observe(view) == Control::Stop {
            control = Control::Stop;
        }
    }
    control
}

fn coverage_of(counter: &mut CoverageCounter, members: &[Individual]) -> Result<usize> {
    counter.clear();
    counter.extend(members.iter().map(Individual::objectives))?;
    Ok(counter.count())
}

/// Generational NSGA-II.
pub struct Nsga2<'o> {
    cfg: NsgaConfig,
    rng: EngineRng,
    counter: CoverageCounter,
    population: Vec<Individual>,
    observers: Vec<Box<dyn Observer + 'o>>,
    trace: RunTrace,
    started: bool,
    stopped: bool,
}

impl<'o> Nsga2<'o> {
    pub fn new(cfg: NsgaConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            rng: EngineRng::seed_from_u64(cfg.seed),
            counter: CoverageCounter::new(cfg.benchmark.front()),
            population: Vec::new(),
            observers: Vec::new(),
            trace: RunTrace::default(),
            started: false,
            stopped: false,
            cfg,
        })
    }

    pub fn config(&self) -> &NsgaConfig {
        &self.cfg
    }

    pub fn attach_observer(&mut self, observer: impl Observer + 'o) -> Result<()> {
        if self.started {
            return Err(Error::State("observers must be attached before the run starts".into()));
        }
        self.observers.push(Box::new(observer));
        Ok(())
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    /// Generations completed so far.
    pub fn generation(&self) -> usize {
        self.trace.records.len().saturating_sub(1)
    }

    pub fn is_finished(&self) -> bool {
        self.stopped || self.generation() >= self.cfg.iterations
    }

    fn initialize(&mut self) -> Result<Control> {
        self.started = true;
        let bench = self.cfg.benchmark;
        self.population = (0..self.cfg.population_size)
            .map(|_| Individual::evaluated(BitString::random(bench.n(), &mut self.rng), &bench))
            .collect::<Result<_>>()?;
        let coverage = coverage_of(&mut self.counter, &self.population)?;
        let record = TraceRecord {
            iteration: 0,
            coverage_p: coverage,
            coverage_r: coverage,
            positive_cdis: 0,
            evaluations: self.cfg.population_size as u64,
        };
        self.trace.records.push(record);
        let view = IterationView {
            iteration: 0,
            record: &record,
            previous: None,
            combined: None,
            population: &self.population,
        };
        Ok(notify(&mut self.observers, &view))
    }

    /// Runs one generation (initializing first if needed).
    pub fn step(&mut self) -> Result<Control> {
        if !self.started
            && self.initialize()? == Control::Stop {
                self.stopped = true;
                return Ok(Control::Stop);
            }
        let n = self.cfg.population_size;
        let bench = self.cfg.benchmark;
        let offspring = generate_offspring(&self.population, &self.cfg.variation, &bench, &mut self.rng)?;
        let mut combined = core::mem::take(&mut self.population);
        combined.extend(offspring);
        let selection = survival_select(self.cfg.survival, &mut combined, n, &mut self.rng)?;
        let next: Vec<Individual> = selection.survivors.iter().map(|&i| combined[i].clone()).collect();

        let coverage_r = coverage_of(&mut self.counter, &combined)?;
        let coverage_p = coverage_of(&mut self.counter, &next)?;
        let record = TraceRecord {
            iteration: self.trace.records.len(),
            coverage_p,
            coverage_r,
            positive_cdis: selection.positive_count,
            evaluations: self.trace.evaluations() + n as u64,
        };
        self.trace.records.push(record);
        let view = IterationView {
            iteration: record.iteration,
            record: &record,
            previous: Some(&combined[..n]),
            combined: Some(&combined),
            population: &next,
        };
        let control = notify(&mut self.observers, &view);
        self.population = next;
        if control == Control::Stop {
            self.stopped = true;
        }
        Ok(control)
    }

    /// Runs until the configured number of generations or an observer stops
    /// the run.
    pub fn run(&mut self) -> Result<&RunTrace> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(&self.trace)
    }

    pub fn into_parts(self) -> (RunTrace, Vec<Individual>) {
        (self.trace, self.population)
    }
}

/// Runs the NSGA-II with an optional observer.
pub fn nsga2_run<'o>(cfg: NsgaConfig, observer: Option<Box<dyn Observer + 'o>>) -> Result<RunTrace> {
    let mut engine = Nsga2::new(cfg)?;
    if let Some(obs) = observer {
        engine.observers.push(obs);
    }
    engine.run()?;
    Ok(engine.into_parts().0)
}

/// SEMO / GSEMO: keeps every non-dominated solution found, one per
/// objective vector.
pub struct Semo<'o> {
    cfg: SemoConfig,
    front: ParetoFront,
    mutation: Mutation,
    rng: EngineRng,
    population: Vec<Individual>,
    on_front: usize,
    evaluations: u64,
    observers: Vec<Box<dyn Observer + 'o>>,
    trace: RunTrace,
    started: bool,
    stopped: bool,
}

impl<'o> Semo<'o> {
    pub fn new(cfg: SemoConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            front: cfg.benchmark.front(),
            mutation: match cfg.mutation {
                SemoMutation::OneBit => Mutation::OneBit,
                SemoMutation::Standard => Mutation::STANDARD,
            },
            rng: EngineRng::seed_from_u64(cfg.seed),
            population: Vec::new(),
            on_front: 0,
            evaluations: 0,
            observers: Vec::new(),
            trace: RunTrace::default(),
            started: false,
            stopped: false,
            cfg,
        })
    }

    pub fn attach_observer(&mut self, observer: impl Observer + 'o) -> Result<()> {
        if self.started {
            return Err(Error::State("observers must be attached before the run starts".into()));
        }
        self.observers.push(Box::new(observer));
        Ok(())
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    /// Covered front points. Members hold pairwise distinct vectors, so
    /// this is the number of members on the front.
    pub fn coverage(&self) -> usize {
        self.on_front
    }

    pub fn is_finished(&self) -> bool {
        self.stopped
            || (self.started
                && (self.on_front == self.front.size() || self.evaluations >= self.cfg.max_evaluations))
    }

    fn on_front(&self, ind: &Individual) -> bool {
        self.front.index_of(ind.objectives()).is_ok()
    }

    fn record_and_notify(&mut self) -> Control {
        let iteration = self.trace.records.len();
        let record = TraceRecord {
            iteration,
            coverage_p: self.on_front,
            coverage_r: self.on_front,
            positive_cdis: 0,
            evaluations: self.evaluations,
        };
        self.trace.records.push(record);
        if self.on_front == self.front.size() && self.trace.iterations_to_coverage.is_none() {
            self.trace.iterations_to_coverage = Some(iteration as u64);
            self.trace.evaluations_to_coverage = Some(self.evaluations);
        }
        let view = IterationView {
            iteration,
            record: &record,
            previous: None,
            combined: None,
            population: &self.population,
        };
        let control = notify(&mut self.observers, &view);
        if control == Control::Stop {
            self.stopped = true;
        }
        control
    }

    fn initialize(&mut self) -> Result<Control> {
        self.started = true;
        let bench = self.cfg.benchmark;
        let x = Individual::evaluated(BitString::random(bench.n(), &mut self.rng), &bench)?;
        self.evaluations = 1;
        self.on_front = usize::from(self.on_front(&x));
        self.population.push(x);
        Ok(self.record_and_notify())
    }

    /// One iteration: mutate a uniformly chosen member and try to insert the
    /// offspring.
    pub fn step(&mut self) -> Result<Control> {
        if !self.started {
            return self.initialize();
        }
        let bench = self.cfg.benchmark;
        let parent = &self.population[self.rng.random_range(0..self.population.len())];
        let child = self.mutation.apply(parent.genotype(), &mut self.rng);
        let child = Individual::evaluated(child, &bench)?;
        self.evaluations += 1;

        let cv = child.objectives().as_slice();
        let rejected = self.population.iter().any(|y| strictly_dominates_slice(y.objectives().as_slice(), cv));
        if !rejected {
            let front = self.front;
            let mut lost = 0;
            self.population.retain(|y| {
                let drop = weakly_dominates_slice(cv, y.objectives().as_slice());
                if drop && front.index_of(y.objectives()).is_ok() {
                    lost += 1;
                }
                !drop
            });
            self.on_front = self.on_front - lost + usize::from(self.on_front(&child));
            self.population.push(child);
        }
        Ok(self.record_and_notify())
    }

    /// Runs until the front is covered, the evaluation budget is spent or an
    /// observer stops the run.
    pub fn run(&mut self) -> Result<&RunTrace> {
        if !self.started {
            self.step()?;
        }
        while !self.is_finished() {
            self.step()?;
        }
        Ok(&self.trace)
    }

    pub fn into_parts(self) -> (RunTrace, Vec<Individual>) {
        (self.trace, self.population)
    }
}

/// Runs SEMO or GSEMO with an optional observer.
pub fn semo_run<'o>(cfg: SemoConfig, observer: Option<Box<dyn Observer + 'o>>) -> Result<RunTrace> {
    let mut engine = Semo::new(cfg)?;
    if let Some(obs) = observer {
        engine.observers.push(obs);
    }
    engine.run()?;
    Ok(engine.into_parts().0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::Mutation;
    use crate::metrics::coverage;
    use crate::ranking::non_dominated_sort;
    use crate::solution::weakly_dominates;
    use alloc::collections::BTreeSet;
    use alloc::rc::Rc;
    use core::cell::{Cell, RefCell};

    fn small_cfg(seed: u64) -> NsgaConfig {
        NsgaConfig::standard(Benchmark::momm(12, 4).unwrap(), 40, 30, seed)
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg(0);
        assert!(cfg.validate().is_ok());
        cfg.population_size = 0;
        assert!(matches!(Nsga2::new(cfg), Err(Error::Config(_))));
        let mut cfg = small_cfg(0);
        cfg.variation.crossover = Crossover::OnePoint { probability: 0.9 };
        cfg.population_size = 41;
        assert!(cfg.validate().is_err());
        cfg.population_size = 42;
        assert!(cfg.validate().is_ok());
        let mut cfg = small_cfg(0);
        cfg.iterations = 0;
        assert!(cfg.validate().is_err());
        let semo = SemoConfig {
            benchmark: Benchmark::momm(8, 4).unwrap(),
            mutation: SemoMutation::OneBit,
            max_evaluations: 0,
            seed: 1,
        };
        assert!(Semo::new(semo).is_err());
    }

    #[test]
    fn trace_shape_and_population_size() {
        let mut engine = Nsga2::new(small_cfg(1)).unwrap();
        let sizes = Rc::new(RefCell::new(Vec::new()));
        let seen = sizes.clone();
        engine
            .attach_observer(move |v: &IterationView<'_>| {
                seen.borrow_mut().push((v.population.len(), v.combined.map(<[_]>::len)));
                Control::Continue
            })
            .unwrap();
        let trace = engine.run().unwrap().clone();
        assert_eq!(trace.records.len(), 31);
        let sizes = sizes.borrow();
        assert_eq!(sizes.len(), trace.records.len());
        assert_eq!(sizes[0], (40, None));
        assert!(sizes[1..].iter().all(|&s| s == (40, Some(80))));
        for (t, r) in trace.records.iter().enumerate() {
            assert_eq!(r.iteration, t);
            assert!(r.coverage_p <= r.coverage_r && r.coverage_r <= 169);
            assert_eq!(r.evaluations, 40 * (t as u64 + 1));
        }
    }

    #[test]
    fn attaching_after_start_is_a_state_error() {
        let mut engine = Nsga2::new(small_cfg(2)).unwrap();
        engine.step().unwrap();
        let err = engine.attach_observer(|_: &IterationView<'_>| Control::Continue).unwrap_err();
        assert!(matches!(err, Error::State(_)));
        let mut semo = Semo::new(SemoConfig {
            benchmark: Benchmark::momm(8, 4).unwrap(),
            mutation: SemoMutation::OneBit,
            max_evaluations: 10,
            seed: 1,
        })
        .unwrap();
        semo.step().unwrap();
        assert!(semo.attach_observer(|_: &IterationView<'_>| Control::Continue).is_err());
    }

    #[test]
    fn seeded_runs_are_identical() {
        for survival in [SurvivalVariant::Original, SurvivalVariant::Sequential] {
            for variation in [
                VariationConfig::mutation_only(),
                VariationConfig { mutation: Mutation::OneBit, crossover: Crossover::OnePoint { probability: 0.9 } },
            ] {
                let cfg = NsgaConfig { survival, variation, ..small_cfg(3) };
                let mut a = Nsga2::new(cfg).unwrap();
                let mut b = Nsga2::new(cfg).unwrap();
                a.run().unwrap();
                b.run().unwrap();
                assert_eq!(a.trace(), b.trace());
                assert_eq!(a.population(), b.population());
            }
        }
        let other = nsga2_run(small_cfg(4), None).unwrap();
        assert_ne!(other, nsga2_run(small_cfg(3), None).unwrap());
    }

    #[test]
    fn cached_objectives_stay_coherent_and_r_is_one_front() {
        let bench = Benchmark::three_omm(12).unwrap();
        let cfg = NsgaConfig { survival: SurvivalVariant::Sequential, ..NsgaConfig::standard(bench, 30, 20, 5) };
        let mut engine = Nsga2::new(cfg).unwrap();
        let failures = Rc::new(Cell::new(0usize));
        let f = failures.clone();
        engine
            .attach_observer(move |v: &IterationView<'_>| {
                for ind in v.population.iter().chain(v.combined.unwrap_or(&[])) {
                    if ind.objectives() != &bench.evaluate(ind.genotype()).unwrap() {
                        f.set(f.get() + 1);
                    }
                }
                if let Some(r) = v.combined {
                    if non_dominated_sort(r).unwrap().len() != 1 {
                        f.set(f.get() + 1);
                    }
                    if coverage(r, &bench.front()).unwrap() != v.record.coverage_r {
                        f.set(f.get() + 1);
                    }
                }
                Control::Continue
            })
            .unwrap();
        engine.run().unwrap();
        assert_eq!(failures.get(), 0);
    }

    #[test]
    fn observer_can_stop_the_run() {
        let mut engine = Nsga2::new(small_cfg(6)).unwrap();
        engine
            .attach_observer(|v: &IterationView<'_>| if v.iteration == 5 { Control::Stop } else { Control::Continue })
            .unwrap();
        let trace = engine.run().unwrap();
        assert_eq!(trace.records.len(), 6);

        // stop as soon as the bi-objective front is covered
        let cfg = NsgaConfig::standard(Benchmark::momm(10, 2).unwrap(), 44, 500, 7);
        let mut engine = Nsga2::new(cfg).unwrap();
        engine
            .attach_observer(|v: &IterationView<'_>| {
                if v.record.coverage_p == 11 { Control::Stop } else { Control::Continue }
            })
            .unwrap();
        let trace = engine.run().unwrap();
        assert_eq!(trace.last().unwrap().coverage_p, 11);
        assert!(trace.records[..trace.records.len() - 1].iter().all(|r| r.coverage_p < 11));
    }

    #[test]
    fn combined_view_carries_crowding_distances() {
        let mut engine = Nsga2::new(small_cfg(8)).unwrap();
        let ok = Rc::new(Cell::new(true));
        let flag = ok.clone();
        engine
            .attach_observer(move |v: &IterationView<'_>| {
                if let Some(r) = v.combined {
                    let positive = r.iter().filter(|i| i.crowding() > 0.0).count();
                    flag.set(flag.get() && positive == v.record.positive_cdis && positive <= 4 * 12 + 8);
                    flag.set(flag.get() && v.previous.unwrap().len() == 40);
                }
                Control::Continue
            })
            .unwrap();
        engine.run().unwrap();
        assert!(ok.get());
    }

    fn semo_cfg(mutation: SemoMutation, seed: u64) -> SemoConfig {
        SemoConfig { benchmark: Benchmark::momm(8, 4).unwrap(), mutation, max_evaluations: 200_000, seed }
    }

    #[test]
    fn semo_population_invariants() {
        for mutation in [SemoMutation::OneBit, SemoMutation::Standard] {
            for bench in [Benchmark::momm(8, 4).unwrap(), Benchmark::three_omm(8).unwrap()] {
                let cfg = SemoConfig { benchmark: bench, ..semo_cfg(mutation, 9) };
                let mut engine = Semo::new(cfg).unwrap();
                let covered = Rc::new(RefCell::new(BTreeSet::new()));
                let violations = Rc::new(Cell::new(0usize));
                let (c, bad) = (covered.clone(), violations.clone());
                let size = bench.front().size();
                engine
                    .attach_observer(move |v: &IterationView<'_>| {
                        let pop = v.population;
                        let now: BTreeSet<_> = pop.iter().map(|i| i.objectives().clone()).collect();
                        if now.len() != pop.len() || pop.len() > size || now.len() != v.record.coverage_p {
                            bad.set(bad.get() + 1);
                        }
                        for a in pop {
                            for b in pop {
                                if a != b && weakly_dominates(a.objectives(), b.objectives()).unwrap() {
                                    bad.set(bad.get() + 1);
                                }
                            }
                        }
                        if !c.borrow().is_subset(&now) {
                            bad.set(bad.get() + 1);
                        }
                        *c.borrow_mut() = now;
                        Control::Continue
                    })
                    .unwrap();
                let trace = engine.run().unwrap().clone();
                assert_eq!(violations.get(), 0);
                assert_eq!(trace.last().unwrap().coverage_p, size);
                let iters = trace.iterations_to_coverage.unwrap();
                assert_eq!(trace.evaluations_to_coverage, Some(iters + 1));
                assert_eq!(trace.records.len() as u64, iters + 1);
            }
        }
    }

    #[test]
    fn semo_respects_the_budget() {
        let cfg = SemoConfig { max_evaluations: 50, ..semo_cfg(SemoMutation::OneBit, 10) };
        let trace = semo_run(cfg, None).unwrap();
        assert_eq!(trace.evaluations(), 50);
        assert_eq!(trace.records.len(), 50);
        assert!(trace.evaluations_to_coverage.is_none());
        assert_eq!(semo_run(cfg, None).unwrap(), trace);
        let one = SemoConfig { max_evaluations: 1, ..cfg };
        assert_eq!(semo_run(one, None).unwrap().records.len(), 1);
    }

    #[test]
    fn nsga2_bi_objective_keeps_covered_points() {
        let cfg = NsgaConfig::standard(Benchmark::momm(10, 2).unwrap(), 4 * 11, 300, 11);
        let trace = nsga2_run(cfg, None).unwrap();
        let first = trace.records.iter().position(|r| r.coverage_p == 11).expect("front not covered");
        assert!(trace.records[first..].iter().all(|r| r.coverage_p == 11));
    }
}
