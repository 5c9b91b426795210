//! The `verify` self-check suite.
//!
//! Every check that involves crowding distances goes through a
//! [`CrowdingFn`], so a deliberately broken implementation can be plugged in
//! to confirm the checks actually catch faults.

use std::fmt;

use moea_core::{
    crowding_distance, non_dominated_sort, positive_count_bound, Benchmark, BitString, EngineRng, ObjectiveVector,
};
use rand::{Rng, SeedableRng};

use crate::oracles::{peeling_sort, straight_crowding};

pub type CrowdingFn = fn(&[ObjectiveVector], usize) -> moea_core::Result<Vec<f64>>;

/// The library implementation.
pub fn library_crowding(set: &[ObjectiveVector], m: usize) -> moea_core::Result<Vec<f64>> {
    crowding_distance(set, m).map(|a| a.into_distances())
}

/// Off-by-one normalization, `(prev - next + 1) / (range + 1)`, used to
/// validate the suite.
pub fn faulty_crowding(set: &[ObjectiveVector], m: usize) -> moea_core::Result<Vec<f64>> {
    let len = set.len();
    let mut dist = vec![0.0; len];
    for k in 0..m {
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by(|&a, &b| set[b].get(k).cmp(&set[a].get(k)));
        let range = f64::from(set[order[0]].get(k) - set[order[len - 1]].get(k));
        dist[order[0]] = f64::INFINITY;
        dist[order[len - 1]] = f64::INFINITY;
        for j in 1..len.saturating_sub(1) {
            let g = f64::from(set[order[j - 1]].get(k) - set[order[j + 1]].get(k));
            dist[order[j]] += (g + 1.0) / (range + 1.0);
        }
    }
    Ok(dist)
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random populations per benchmark for the positive-count bounds.
    pub bound_populations: usize,
    pub max_population: usize,
    pub oracle_instances: usize,
    pub zero_removal_populations: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 0, bound_populations: 200, max_population: 10_000, oracle_instances: 500, zero_removal_populations: 100 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: expected {}, got {}", self.name, self.expected, self.actual)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

pub fn run_verify(options: &VerifyOptions) -> VerifyReport {
    run_verify_with(library_crowding, options)
}

pub fn run_verify_with(crowding: CrowdingFn, options: &VerifyOptions) -> VerifyReport {
    let mut rng = EngineRng::seed_from_u64(options.seed);
    let mut checks = vec![deceptive_example(crowding)];
    for (bench, label) in [
        (Benchmark::momm(40, 4), "bound-momm-n40-m4"),
        (Benchmark::momm(42, 6), "bound-momm-n42-m6"),
        (Benchmark::three_omm(40), "bound-3omm-n40"),
    ] {
        checks.push(bound_check(crowding, bench.expect("valid benchmark"), label, options, &mut rng));
    }
    checks.push(zero_removal(crowding, options, &mut rng));
    checks.push(sort_oracle(options, &mut rng));
    checks.push(crowding_oracle(crowding, options, &mut rng));
    VerifyReport { checks }
}

/// The five vectors whose center point is deceptively rated.
pub fn deceptive_vectors() -> Vec<ObjectiveVector> {
    [[99, 101, 0, 200], [101, 99, 0, 200], [0, 200, 99, 101], [0, 200, 101, 99], [100, 100, 100, 100]]
        .into_iter()
        .map(ObjectiveVector::from)
        .collect()
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn deceptive_example(crowding: CrowdingFn) -> Check {
    let base = deceptive_vectors();
    let target = 8.0 / 101.0;
    let mut worst_err = 0.0f64;
    let mut ordered = true;
    for perm in permutations(base.len()) {
        let set: Vec<_> = perm.iter().map(|&i| base[i].clone()).collect();
        let Ok(d) = crowding(&set, 4) else {
            ordered = false;
            continue;
        };
        let c = perm.iter().position(|&i| i == 4).unwrap();
        worst_err = worst_err.max((d[c] - target).abs());
        ordered &= d.iter().enumerate().all(|(j, &x)| j == c || x > d[c]);
    }
    let passed = worst_err <= 1e-12 && ordered;
    Check {
        name: "deceptive-example".into(),
        passed,
        expected: format!("center = 8/101 = {target:.10} within 1e-12 and strictly smallest, all 120 orders"),
        actual: format!("max |error| = {worst_err:.3e}, strictly smallest in every order: {ordered}"),
    }
}

fn random_population(bench: &Benchmark, size: usize, rng: &mut EngineRng) -> Vec<ObjectiveVector> {
    (0..size)
        .map(|_| bench.evaluate(&BitString::random(bench.n(), rng)).expect("length matches"))
        .collect()
}

fn positives(d: &[f64]) -> usize {
    d.iter().filter(|&&x| x > 0.0).count()
}

fn bound_check(crowding: CrowdingFn, bench: Benchmark, name: &str, o: &VerifyOptions, rng: &mut EngineRng) -> Check {
    let bound = positive_count_bound(&bench.front().value_counts());
    let mut worst = 0;
    let mut violations = 0;
    for _ in 0..o.bound_populations {
        let size = rng.random_range(100.min(o.max_population)..=o.max_population);
        let pop = random_population(&bench, size, rng);
        let count = crowding(&pop, bench.objectives()).map_or(usize::MAX, |d| positives(&d));
        worst = worst.max(count);
        violations += usize::from(count > bound);
    }
    Check {
        name: name.into(),
        passed: violations == 0,
        expected: format!("positive count <= {bound} in {} populations", o.bound_populations),
        actual: format!("max {worst}, {violations} violations"),
    }
}

fn zero_removal(crowding: CrowdingFn, o: &VerifyOptions, rng: &mut EngineRng) -> Check {
    let benches = [Benchmark::momm(40, 4).unwrap(), Benchmark::momm(42, 6).unwrap(), Benchmark::momm(12, 4).unwrap()];
    let mut removals = 0usize;
    let mut changed = 0usize;
    for p in 0..o.zero_removal_populations {
        let bench = benches[p % benches.len()];
        let m = bench.objectives();
        let pop = random_population(&bench, rng.random_range(2..=500), rng);
        let Ok(d) = crowding(&pop, m) else {
            changed += 1;
            continue;
        };
        for z in (0..pop.len()).filter(|&i| d[i] == 0.0) {
            removals += 1;
            let mut rest = pop.clone();
            rest.remove(z);
            let expected: Vec<f64> = d.iter().enumerate().filter(|&(i, _)| i != z).map(|(_, &x)| x).collect();
            let same = crowding(&rest, m).is_ok_and(|e| {
                e.iter().zip(&expected).all(|(a, b)| a.to_bits() == b.to_bits())
            });
            changed += usize::from(!same);
        }
    }
    Check {
        name: "zero-removal".into(),
        passed: changed == 0 && removals > 0,
        expected: "removing a zero-distance member leaves every other distance bit-identical".into(),
        actual: format!("{removals} removals, {changed} changed"),
    }
}

fn random_vectors(rng: &mut EngineRng, m: usize, max_len: usize, max_value: u32) -> Vec<ObjectiveVector> {
    let len = rng.random_range(1..=max_len);
    (0..len).map(|_| ObjectiveVector::new((0..m).map(|_| rng.random_range(0..=max_value)).collect())).collect()
}

fn sort_oracle(o: &VerifyOptions, rng: &mut EngineRng) -> Check {
    let mut mismatches = 0;
    for _ in 0..o.oracle_instances {
        let m = rng.random_range(2..=4);
        let pop = random_vectors(rng, m, 64, 5);
        let ours = non_dominated_sort(&pop).map(|p| p.into_fronts());
        mismatches += usize::from(ours.ok().as_ref() != Some(&peeling_sort(&pop)));
    }
    Check {
        name: "sort-oracle".into(),
        passed: mismatches == 0,
        expected: format!("fronts identical to repeated peeling on {} instances", o.oracle_instances),
        actual: format!("{mismatches} mismatches"),
    }
}

fn crowding_oracle(crowding: CrowdingFn, o: &VerifyOptions, rng: &mut EngineRng) -> Check {
    let mut mismatches = 0;
    for _ in 0..o.oracle_instances {
        let m = rng.random_range(1..=6);
        let max_value = if rng.random_bool(0.5) { 4 } else { 1000 };
        let set = random_vectors(rng, m, 64, max_value);
        let same = crowding(&set, m).is_ok_and(|d| {
            d.iter().zip(straight_crowding(&set, m)).all(|(a, b)| a.to_bits() == b.to_bits())
        });
        mismatches += usize::from(!same);
    }
    Check {
        name: "crowding-oracle".into(),
        passed: mismatches == 0,
        expected: format!("distances bit-identical to the straight-line version on {} instances", o.oracle_instances),
        actual: format!("{mismatches} mismatches"),
    }
}
