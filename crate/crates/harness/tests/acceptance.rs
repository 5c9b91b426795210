//! Acceptance criteria at experiment scale. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use moea_core::{
    crowding_distance, non_dominated_sort, nsga2_run, semo_run, Benchmark, BitString, EngineRng, NsgaConfig,
    ObjectiveVector, SemoConfig, SemoMutation,
};
use moea_harness::oracles::{peeling_sort, straight_crowding};
use moea_harness::verify::{deceptive_vectors, permutations};
use moea_harness::{run_sweep, ExperimentConfig, RunOptions};
use rand::{Rng, SeedableRng};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn random_population(bench: &Benchmark, size: usize, rng: &mut EngineRng) -> Vec<ObjectiveVector> {
    (0..size).map(|_| bench.evaluate(&BitString::random(bench.n(), rng)).unwrap()).collect()
}

fn criterion_1() -> Outcome {
    let base = deceptive_vectors();
    let target = 8.0 / 101.0;
    let mut worst = 0.0f64;
    let mut ordered = true;
    for perm in permutations(5) {
        let set: Vec<_> = perm.iter().map(|&i| base[i].clone()).collect();
        let d = crowding_distance(&set, 4).unwrap().into_distances();
        let c = perm.iter().position(|&i| i == 4).unwrap();
        worst = worst.max((d[c] - target).abs());
        ordered &= (0..5).all(|j| j == c || d[j] > d[c]);
    }
    outcome(
        worst <= 1e-12 && ordered,
        format!("120 orders, max |d - 8/101| = {worst:.2e}, others strictly larger: {ordered}"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = EngineRng::seed_from_u64(2);
    let cases = [
        (Benchmark::momm(40, 4).unwrap(), 168),
        (Benchmark::momm(42, 6).unwrap(), 180),
        (Benchmark::three_omm(40).unwrap(), 166),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (bench, bound) in cases {
        let mut worst = 0;
        let mut violations = 0;
        for _ in 0..200 {
            let size = rng.random_range(100..=10_000);
            let pop = random_population(&bench, size, &mut rng);
            let count = crowding_distance(&pop, bench.objectives()).unwrap().positive_count();
            worst = worst.max(count);
            violations += usize::from(count > bound);
        }
        passed &= violations == 0;
        parts.push(format!("{} m={}: max {worst} <= {bound}, {violations} violations", bench.id(), bench.objectives()));
    }
    outcome(passed, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let mut rng = EngineRng::seed_from_u64(3);
    let (mut sort_bad, mut crowd_bad) = (0, 0);
    for i in 0..500 {
        let m = rng.random_range(2..=5);
        let len = rng.random_range(1..=64);
        let max = if i % 2 == 0 { 4 } else { 200 };
        let pop: Vec<ObjectiveVector> =
            (0..len).map(|_| ObjectiveVector::new((0..m).map(|_| rng.random_range(0..=max)).collect())).collect();
        if non_dominated_sort(&pop).unwrap().into_fronts() != peeling_sort(&pop) {
            sort_bad += 1;
        }
        let ours = crowding_distance(&pop, m).unwrap().into_distances();
        if ours.iter().zip(straight_crowding(&pop, m)).any(|(a, b)| a.to_bits() != b.to_bits()) {
            crowd_bad += 1;
        }
    }
    outcome(sort_bad == 0 && crowd_bad == 0, format!("500 instances: {sort_bad} sort and {crowd_bad} crowding mismatches"))
}

fn criterion_4() -> Outcome {
    let mut rng = EngineRng::seed_from_u64(4);
    let benches = [Benchmark::momm(40, 4).unwrap(), Benchmark::momm(42, 6).unwrap(), Benchmark::momm(40, 2).unwrap()];
    let (mut removals, mut changed) = (0, 0);
    for p in 0..100 {
        let bench = benches[p % 3];
        let m = bench.objectives();
        let pop = random_population(&bench, rng.random_range(2..=500), &mut rng);
        let d = crowding_distance(&pop, m).unwrap().into_distances();
        for z in (0..pop.len()).filter(|&i| d[i] == 0.0) {
            removals += 1;
            let mut rest = pop.clone();
            rest.remove(z);
            let after = crowding_distance(&rest, m).unwrap().into_distances();
            let before = d.iter().enumerate().filter(|&(i, _)| i != z).map(|(_, x)| x);
            if before.zip(&after).any(|(a, b)| a.to_bits() != b.to_bits()) {
                changed += 1;
            }
        }
    }
    outcome(changed == 0 && removals > 0, format!("100 populations, {removals} removals, {changed} changed any distance"))
}

fn criterion_5() -> Outcome {
    let bench = Benchmark::momm(40, 4).unwrap();
    let mut passed = true;
    let mut parts = Vec::new();
    for seed in 0..5 {
        let trace = nsga2_run(NsgaConfig::standard(bench, 1764, 1000, seed), None).unwrap();
        let max_p = trace.records.iter().map(|r| r.coverage_p).max().unwrap();
        let last = trace.last().unwrap();
        passed &= trace.records.len() == 1001 && max_p < 441 && last.iteration == 1000 && last.coverage_r < 441;
        parts.push(format!("seed {seed}: max P {max_p}, R@1000 {}", last.coverage_r));
    }
    outcome(passed, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let bench = Benchmark::three_omm(40).unwrap();
    let finals: Vec<f64> = (0..10)
        .map(|seed| nsga2_run(NsgaConfig::standard(bench, 16 * 441, 1000, seed), None).unwrap().last().unwrap().coverage_r as f64)
        .collect();
    let s = moea_core::summarize(&finals).unwrap();
    outcome((251.0..=331.0).contains(&s.mean), format!("mean R@1000 = {:.1} (std {:.2}), band [251, 331]", s.mean, s.std))
}

fn criterion_7() -> Outcome {
    let bench = Benchmark::momm(40, 4).unwrap();
    let mut evals = Vec::new();
    let mut uncovered = 0;
    for seed in 0..30 {
        let cfg = SemoConfig { benchmark: bench, mutation: SemoMutation::Standard, max_evaluations: 500_000, seed };
        match semo_run(cfg, None).unwrap().evaluations_to_coverage {
            Some(e) => evals.push(e as f64),
            None => uncovered += 1,
        }
    }
    let Ok(s) = moea_core::summarize(&evals) else {
        return outcome(false, "no run covered the front".into());
    };
    outcome(
        uncovered == 0 && (4.4e4..=1.8e5).contains(&s.mean),
        format!("{}/30 covered within 5e5, mean {:.0} (std {:.0}), band [4.4e4, 1.8e5]", evals.len(), s.mean, s.std),
    )
}

fn criterion_8() -> Outcome {
    let bench = Benchmark::momm(40, 2).unwrap();
    let mut passed = true;
    let mut firsts = Vec::new();
    for seed in 0..10 {
        let trace = nsga2_run(NsgaConfig::standard(bench, 164, 2000, seed), None).unwrap();
        match trace.records.iter().position(|r| r.coverage_p == 41) {
            Some(t) => {
                passed &= trace.records[t..].iter().all(|r| r.coverage_p == 41);
                firsts.push(t);
            }
            None => passed = false,
        }
    }
    outcome(passed && firsts.len() == 10, format!("{}/10 covered, first full coverage at {firsts:?}, never dropped: {passed}", firsts.len()))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { out: dir.path().to_path_buf(), ..ExperimentConfig::default() };
    let rows = run_sweep(&cfg, &[4, 16, 64], &RunOptions::default()).unwrap();
    let means: Vec<f64> = rows.iter().map(|r| r.coverage_p.mean).collect();
    let increasing = means.windows(2).all(|w| w[0] < w[1]);
    let below = rows.iter().all(|r| r.coverage_p.max < 441.0);
    outcome(increasing && below, format!("mean final P for 4M/16M/64M = {means:?}, all runs < 441: {below}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 deceptive example", criterion_1),
        ("2 positive-count bounds", criterion_2),
        ("3 oracle equivalence", criterion_3),
        ("4 zero-removal invariance", criterion_4),
        ("5 NSGA-II stagnation", criterion_5),
        ("6 3-OMM coverage", criterion_6),
        ("7 GSEMO efficiency", criterion_7),
        ("8 bi-objective control", criterion_8),
        ("9 population sweep", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        failed += usize::from(!o.passed);
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} criterion {name}: {} [{:.1}s]", o.detail, start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
