//! Parent selection, variation and survival selection for the NSGA-II.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::benchmarks::Benchmark;
use crate::crowding::{crowding_distance, gap, sort_descending};
use crate::error::{check_len, Error, Result};
use crate::ranking::{critical_front_index, non_dominated_sort};
use crate::solution::{BitString, Individual, ObjectiveVector};

/// Mutation operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mutation {
    /// Flip exactly one uniformly chosen bit.
    OneBit,
    /// Flip every bit independently; `None` means rate `1/n`.
    Bitwise { rate: Option<f64> },
}

impl Mutation {
    /// Standard bit-wise mutation with rate `1/n`.
    pub const STANDARD: Mutation = Mutation::Bitwise { rate: None };

    fn validate(&self) -> Result<()> {
        match *self {
            Mutation::Bitwise { rate: Some(r) } if !(0.0..=1.0).contains(&r) => {
                Err(Error::Config(format!("mutation rate {r} is not a probability")))
            }
            _ => Ok(()),
        }
    }

    pub fn apply<R: Rng + ?Sized>(&self, x: &BitString, rng: &mut R) -> BitString {
        match *self {
            Mutation::OneBit => one_bit_mutation(x, rng),
            Mutation::Bitwise { rate } => {
                let rate = rate.unwrap_or(1.0 / x.len() as f64);
                bitwise_mutation(x, rate, rng)
            }
        }
    }
}

/// Crossover operator applied to consecutive parent pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Crossover {
    Off,
    /// One-point crossover applied to each pair with the given probability.
    OnePoint { probability: f64 },
}

impl Crossover {
    pub const DEFAULT_PROBABILITY: f64 = 0.9;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationConfig {
    pub mutation: Mutation,
    pub crossover: Crossover,
}

impl VariationConfig {
    /// Standard bit-wise mutation only.
    pub fn mutation_only() -> Self {
        Self { mutation: Mutation::STANDARD, crossover: Crossover::Off }
    }

    pub fn validate(&self) -> Result<()> {
        self.mutation.validate()?;
        if let Crossover::OnePoint { probability } = self.crossover {
            if !(0.0..=1.0).contains(&probability) {
                return Err(Error::Config(format!(
                    "crossover probability {probability} is not a probability"
                )));
            }
        }
        Ok(())
    }
}

impl Default for VariationConfig {
    fn default() -> Self {
        Self::mutation_only()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum SurvivalVariant {
    /// Keep the critical-front members with the largest crowding distance.
    #[default]
    Original,
    /// Repeatedly drop the member with the smallest distance, refreshing
    /// distances after each removal.
    Sequential,
}

/// Every index in `0..n` exactly once, in uniformly random order.
pub fn fair_parent_selection<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

pub fn one_bit_mutation<R: Rng + ?Sized>(x: &BitString, rng: &mut R) -> BitString {
    assert!(!x.is_empty(), "one-bit mutation needs at least one bit");
    let mut y = x.clone();
    y.flip(rng.random_range(0..x.len()));
    y
}

/// Flips each bit independently with probability `rate`.
pub fn bitwise_mutation<R: Rng + ?Sized>(x: &BitString, rate: f64, rng: &mut R) -> BitString {
    assert!((0.0..=1.0).contains(&rate), "mutation rate {rate} is not a probability");
    let mut y = x.clone();
    for i in 0..x.len() {
        if rng.random_bool(rate) {
            y.flip(i);
        }
    }
    y
}

/// One-point crossover at a uniformly random position `i` in `1..=n`.
pub fn one_point_crossover<R: Rng + ?Sized>(
    a: &BitString,
    b: &BitString,
    rng: &mut R,
) -> Result<(BitString, BitString)> {
    check_len(a.len(), b.len())?;
    if a.is_empty() {
        return Ok((a.clone(), b.clone()));
    }
    let i = rng.random_range(1..=a.len());
    one_point_crossover_at(a, b, i)
}

/// The parents exchange their first `i` bits: the first child is
/// `b[..i] + a[i..]` and the second `a[..i] + b[i..]`.
pub fn one_point_crossover_at(a: &BitString, b: &BitString, i: usize) -> Result<(BitString, BitString)> {
    check_len(a.len(), b.len())?;
    if i > a.len() {
        return Err(Error::InvalidInput(format!("crossover point {i} beyond length {}", a.len())));
    }
    let mut first = a.clone();
    let mut second = b.clone();
    first.copy_range_from(b, 0, i);
    second.copy_range_from(a, 0, i);
    Ok((first, second))
}

/// Builds the offspring population: fair selection, then optional
/// crossover on consecutive pairs, then mutation. One offspring per parent.
pub fn generate_offspring<R: Rng + ?Sized>(
    parents: &[Individual],
    variation: &VariationConfig,
    benchmark: &Benchmark,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    let order = fair_parent_selection(parents.len(), rng);
    let mut offspring = Vec::with_capacity(parents.len());
    match variation.crossover {
        Crossover::Off => {
            for &p in &order {
                let child = variation.mutation.apply(parents[p].genotype(), rng);
                offspring.push(Individual::evaluated(child, benchmark)?);
            }
        }
        Crossover::OnePoint { probability } => {
            if !parents.len().is_multiple_of(2) {
                return Err(Error::Config("crossover needs an even population size".into()));
            }
            for pair in order.chunks_exact(2) {
                let (a, b) = (parents[pair[0]].genotype(), parents[pair[1]].genotype());
                let (x, y) = if rng.random_bool(probability) {
                    one_point_crossover(a, b, rng)?
                } else {
                    (a.clone(), b.clone())
                };
                for child in [x, y] {
                    let child = variation.mutation.apply(&child, rng);
                    offspring.push(Individual::evaluated(child, benchmark)?);
                }
            }
        }
    }
    Ok(offspring)
}

/// Result of a survival selection over a combined population.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    /// Indices into the combined population, `n` of them.
    pub survivors: Vec<usize>,
    /// Number of individuals in `F_1..F_{i*}` with positive crowding
    /// distance at the time the distances were first computed.
    pub positive_count: usize,
    /// 1-based index of the critical front.
    pub critical_front: usize,
}

/// Ranks `combined`, writes the crowding distance of every member of
/// `F_1..F_{i*}` into the individuals (others get 0), and selects `n`
/// survivors with the given variant.
pub fn survival_select<R: Rng + ?Sized>(
    variant: SurvivalVariant,
    combined: &mut [Individual],
    n: usize,
    rng: &mut R,
) -> Result<Selection> {
    if n == 0 || n > combined.len() {
        return Err(Error::InvalidInput(format!(
            "cannot keep {n} individuals out of {}",
            combined.len()
        )));
    }
    let m = combined[0].objectives().len();
    let partition = non_dominated_sort(combined)?;
    let critical = critical_front_index(&partition, n)?;
    let fronts = partition.into_fronts();

    for ind in combined.iter_mut() {
        ind.set_crowding(0.0);
    }
    let mut positive_count = 0;
    for front in &fronts[..critical] {
        let members: Vec<&ObjectiveVector> = front.iter().map(|&i| combined[i].objectives()).collect();
        let assignment = crowding_distance(&members, m)?;
        positive_count += assignment.positive_count();
        for (&i, &d) in front.iter().zip(assignment.distances()) {
            combined[i].set_crowding(d);
        }
    }

    let mut survivors: Vec<usize> = fronts[..critical - 1].iter().flatten().copied().collect();
    let need = n - survivors.len();
    let last = &fronts[critical - 1];
    match variant {
        SurvivalVariant::Original => {
            let mut pool = last.clone();
            pool.shuffle(rng);
            // stable sort keeps the random order among equal distances
            pool.sort_by(|&a, &b| combined[b].crowding().total_cmp(&combined[a].crowding()));
            survivors.extend_from_slice(&pool[..need]);
        }
        SurvivalVariant::Sequential => {
            let members: Vec<&ObjectiveVector> = last.iter().map(|&i| combined[i].objectives()).collect();
            let mut state = SequentialCrowding::new(&members, m)?;
            while state.remaining() > need {
                let victim = state.pick_smallest(rng);
                state.remove(victim);
            }
            survivors.extend(state.alive().map(|k| last[k]));
        }
    }
    Ok(Selection { survivors, positive_count, critical_front: critical })
}

/// Original survival selection, returning the survivors themselves.
pub fn survival_select_original<R: Rng + ?Sized>(
    combined: &mut [Individual],
    n: usize,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    let sel = survival_select(SurvivalVariant::Original, combined, n, rng)?;
    Ok(sel.survivors.iter().map(|&i| combined[i].clone()).collect())
}

/// Sequential survival selection, returning the survivors themselves.
pub fn survival_select_sequential<R: Rng + ?Sized>(
    combined: &mut [Individual],
    n: usize,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    let sel = survival_select(SurvivalVariant::Sequential, combined, n, rng)?;
    Ok(sel.survivors.iter().map(|&i| combined[i].clone()).collect())
}

const NIL: usize = usize::MAX;

/// Crowding distances of a shrinking set, kept equal to a from-scratch
/// computation on the current members after every removal.
///
/// Each objective keeps its sort order as a doubly linked list; removing an
/// interior member only touches its two list neighbours, removing a sort
/// boundary recomputes that objective. Per-objective contributions are
/// summed in objective order, so the floating point result matches the
/// batch computation bit for bit.
pub struct SequentialCrowding {
    values: Vec<Vec<u32>>,
    prev: Vec<Vec<usize>>,
    next: Vec<Vec<usize>>,
    head: Vec<usize>,
    tail: Vec<usize>,
    contrib: Vec<Vec<f64>>,
    distance: Vec<f64>,
    alive: Vec<bool>,
    remaining: usize,
    buckets: BTreeMap<u64, Vec<usize>>,
    slot: Vec<usize>,
}

impl SequentialCrowding {
    pub fn new<T: AsRef<ObjectiveVector>>(set: &[T], m: usize) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::InvalidInput("empty set".into()));
        }
        let len = set.len();
        let mut values = vec![vec![0u32; len]; m];
        for (i, s) in set.iter().enumerate() {
            check_len(m, s.as_ref().len())?;
            for (obj, row) in values.iter_mut().enumerate() {
                row[i] = s.as_ref().get(obj);
            }
        }
        let mut state = Self {
            prev: vec![vec![NIL; len]; m],
            next: vec![vec![NIL; len]; m],
            head: vec![NIL; m],
            tail: vec![NIL; m],
            contrib: vec![vec![0.0; len]; m],
            distance: vec![0.0; len],
            alive: vec![true; len],
            remaining: len,
            buckets: BTreeMap::new(),
            slot: vec![0; len],
            values,
        };
        let mut order: Vec<usize> = (0..len).collect();
        for obj in 0..m {
            sort_descending(&mut order, |i| state.values[obj][i]);
            for w in order.windows(2) {
                state.next[obj][w[0]] = w[1];
                state.prev[obj][w[1]] = w[0];
            }
            state.head[obj] = order[0];
            state.tail[obj] = order[len - 1];
            state.refresh_objective(obj);
        }
        for i in 0..len {
            state.distance[i] = state.total(i);
            state.bucket_insert(i);
        }
        Ok(state)
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    pub fn is_alive(&self, i: usize) -> bool {
        self.alive[i]
    }

    /// Indices of the members still present, ascending.
    pub fn alive(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(|&i| self.alive[i])
    }

    /// Current distance of a member that has not been removed.
    pub fn distance(&self, i: usize) -> f64 {
        debug_assert!(self.alive[i]);
        self.distance[i]
    }

    /// A uniformly random member among those with the smallest distance.
    pub fn pick_smallest<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let (_, ties) = self.buckets.iter().next().expect("no members left");
        ties[rng.random_range(0..ties.len())]
    }

    pub fn remove(&mut self, i: usize) {
        assert!(self.alive[i], "member {i} already removed");
        self.bucket_remove(i);
        self.alive[i] = false;
        self.remaining -= 1;
        let mut touched = Vec::new();
        for obj in 0..self.values.len() {
            let (p, q) = (self.prev[obj][i], self.next[obj][i]);
            if p == NIL {
                self.head[obj] = q;
            } else {
                self.next[obj][p] = q;
            }
            if q == NIL {
                self.tail[obj] = p;
            } else {
                self.prev[obj][q] = p;
            }
            if p == NIL || q == NIL {
                // a boundary left: the range may have changed
                touched.extend(self.refresh_objective(obj));
            } else {
                for k in [p, q] {
                    self.contrib[obj][k] = self.interior_gap(obj, k);
                    touched.push(k);
                }
            }
        }
        touched.sort_unstable();
        touched.dedup();
        for k in touched {
            let d = self.total(k);
            if d.to_bits() != self.distance[k].to_bits() {
                self.bucket_remove(k);
                self.distance[k] = d;
                self.bucket_insert(k);
            }
        }
    }

    fn is_boundary(&self, obj: usize, k: usize) -> bool {
        self.prev[obj][k] == NIL || self.next[obj][k] == NIL
    }

    fn range(&self, obj: usize) -> u32 {
        self.values[obj][self.head[obj]] - self.values[obj][self.tail[obj]]
    }

    fn interior_gap(&self, obj: usize, k: usize) -> f64 {
        if self.is_boundary(obj, k) {
            return 0.0;
        }
        let range = self.range(obj);
        if range == 0 {
            return 0.0;
        }
        let row = &self.values[obj];
        gap(row[self.prev[obj][k]], row[self.next[obj][k]], range)
    }

    /// Recomputes every contribution of one objective; returns the members
    /// visited.
    fn refresh_objective(&mut self, obj: usize) -> Vec<usize> {
        let mut visited = Vec::with_capacity(self.remaining);
        let mut k = self.head[obj];
        while k != NIL {
            self.contrib[obj][k] = self.interior_gap(obj, k);
            visited.push(k);
            k = self.next[obj][k];
        }
        visited
    }

    fn total(&self, k: usize) -> f64 {
        let mut d = 0.0f64;
        for obj in 0..self.values.len() {
            if self.is_boundary(obj, k) {
                d = f64::INFINITY;
            } else {
                d += self.contrib[obj][k];
            }
        }
        d
    }

    fn bucket_insert(&mut self, k: usize) {
        let ties = self.buckets.entry(self.distance[k].to_bits()).or_default();
        self.slot[k] = ties.len();
        ties.push(k);
    }

    fn bucket_remove(&mut self, k: usize) {
        let key = self.distance[k].to_bits();
        let ties = self.buckets.get_mut(&key).expect("member missing from its bucket");
        let at = self.slot[k];
        ties.swap_remove(at);
        if let Some(&moved) = ties.get(at) {
            self.slot[moved] = at;
        }
        if ties.is_empty() {
            self.buckets.remove(&key);
        }
    }
}
