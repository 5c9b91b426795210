//! Non-dominated sorting.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::solution::{strictly_dominates_slice, ObjectiveVector};

/// Fronts `F_1, F_2, ...` as lists of indices into the sorted population.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontPartition {
    fronts: Vec<Vec<usize>>,
}

impl FrontPartition {
    pub fn fronts(&self) -> &[Vec<usize>] {
        &self.fronts
    }

    pub fn len(&self) -> usize {
        self.fronts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fronts.is_empty()
    }

    /// Total number of indexed individuals.
    pub fn population_size(&self) -> usize {
        self.fronts.iter().map(Vec::len).sum()
    }

    /// Front of each individual, 0-based.
    pub fn rank_of(&self) -> Vec<usize> {
        let mut rank = vec![0; self.population_size()];
        for (k, front) in self.fronts.iter().enumerate() {
            for &i in front {
                rank[i] = k;
            }
        }
        rank
    }

    pub fn into_fronts(self) -> Vec<Vec<usize>> {
        self.fronts
    }
}

/// Partitions `population` into non-dominated fronts.
///
/// Individuals with equal objective vectors are grouped first, so the
/// quadratic dominance pass runs over distinct vectors only. Within a front,
/// indices appear in input order.
pub fn non_dominated_sort<T: AsRef<ObjectiveVector>>(population: &[T]) -> Result<FrontPartition> {
    if population.is_empty() {
        return Err(Error::InvalidInput("cannot sort an empty population".into()));
    }
    let m = population[0].as_ref().len();
    if let Some(bad) = population.iter().find(|p| p.as_ref().len() != m) {
        return Err(Error::LengthMismatch { expected: m, found: bad.as_ref().len() });
    }

    // group equal vectors
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| population[a].as_ref().cmp(population[b].as_ref()));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if population[g[0]].as_ref() == population[i].as_ref() => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let reps: Vec<&[u32]> = groups.iter().map(|g| population[g[0]].as_ref().as_slice()).collect();

    // fast non-dominated sort over the distinct vectors
    let d = reps.len();
    let mut dominated_by_count = vec![0usize; d];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); d];
    for p in 0..d {
        for q in p + 1..d {
            if strictly_dominates_slice(reps[p], reps[q]) {
                dominates[p].push(q);
                dominated_by_count[q] += 1;
            } else if strictly_dominates_slice(reps[q], reps[p]) {
                dominates[q].push(p);
                dominated_by_count[p] += 1;
            }
        }
    }
    let mut current: Vec<usize> = (0..d).filter(|&p| dominated_by_count[p] == 0).collect();
    let mut fronts = Vec::new();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominates[p] {
                dominated_by_count[q] -= 1;
                if dominated_by_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        let mut members: Vec<usize> = current.iter().flat_map(|&g| groups[g].iter().copied()).collect();
        members.sort_unstable();
        fronts.push(members);
        current = next;
    }
    Ok(FrontPartition { fronts })
}

/// Smallest 1-based `i*` with `|F_1 ∪ ... ∪ F_{i*}| >= n`.
pub fn critical_front_index(partition: &FrontPartition, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidInput("target size must be positive".into()));
    }
    let mut cumulative = 0;
    for (k, front) in partition.fronts.iter().enumerate() {
        cumulative += front.len();
        if cumulative >= n {
            return Ok(k + 1);
        }
    }
    Err(Error::InvalidInput(format!(
        "target size {n} exceeds population size {cumulative}"
    )))
}
