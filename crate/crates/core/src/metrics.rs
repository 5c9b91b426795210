//! Pareto-front coverage, front neighbourhoods and summary statistics.

use alloc::vec;
use alloc::vec::Vec;

use crate::benchmarks::ParetoFront;
use crate::error::{Error, Result};
use crate::solution::ObjectiveVector;

/// Set of covered front points, stored as a bit set over front indices.
#[derive(Clone, Debug)]
pub struct CoverageCounter {
    front: ParetoFront,
    words: Vec<u64>,
    count: usize,
}

impl CoverageCounter {
    pub fn new(front: ParetoFront) -> Self {
        Self { words: vec![0; front.size().div_ceil(64)], front, count: 0 }
    }

    pub fn front(&self) -> &ParetoFront {
        &self.front
    }

    /// Marks `v` as covered; returns whether it was new.
    pub fn insert(&mut self, v: &ObjectiveVector) -> Result<bool> {
        let idx = self.front.index_of(v)?;
        Ok(self.insert_index(idx))
    }

    fn insert_index(&mut self, idx: usize) -> bool {
        let (w, bit) = (idx / 64, 1u64 << (idx % 64));
        let fresh = self.words[w] & bit == 0;
        if fresh {
            self.words[w] |= bit;
            self.count += 1;
        }
        fresh
    }

    pub fn extend<'a, I>(&mut self, vectors: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a ObjectiveVector>,
    {
        for v in vectors {
            self.insert(v)?;
        }
        Ok(())
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        idx < self.front.size() && self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// Number of covered front points.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_complete(&self) -> bool {
        self.count == self.front.size()
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
        self.count = 0;
    }

    /// Front indices that are covered, ascending.
    pub fn covered_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.front.size()).filter(|&i| self.contains_index(i))
    }
}

/// Number of distinct front points equal to some member's objectives.
pub fn coverage<T: AsRef<ObjectiveVector>>(population: &[T], front: &ParetoFront) -> Result<usize> {
    let mut counter = CoverageCounter::new(*front);
    counter.extend(population.iter().map(AsRef::as_ref))?;
    Ok(counter.count())
}

/// Front points that differ from `v` by exactly one in exactly one free
/// coordinate, ordered by coordinate and then `-1` before `+1`.
pub fn neighbors(v: &ObjectiveVector, front: &ParetoFront) -> Result<Vec<ObjectiveVector>> {
    let free = front.free_coordinates(v)?;
    let side = front.side();
    let mut out = Vec::with_capacity(2 * free.len());
    for k in 0..free.len() {
        let mut moved = free.clone();
        if free[k] > 0 {
            moved[k] = free[k] - 1;
            out.push(front.from_free_coordinates(&moved));
        }
        if free[k] < side {
            moved[k] = free[k] + 1;
            out.push(front.from_free_coordinates(&moved));
        }
    }
    Ok(out)
}

/// Mean, population standard deviation, minimum and maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::InvalidInput("cannot summarize an empty sequence".into()));
    }
    let count = values.len();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = (values.iter().sum::<f64>() / count as f64).clamp(min, max);
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / count as f64;
    Ok(SummaryStats { count, mean, std: libm::sqrt(var), min, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::Benchmark;
    use crate::solution::{BitString, Individual};
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn ov(v: &[u32]) -> ObjectiveVector {
        ObjectiveVector::from(v)
    }

    #[test]
    fn coverage_examples() {
        let b = Benchmark::momm(8, 4).unwrap();
        let front = b.front();
        let empty: Vec<ObjectiveVector> = Vec::new();
        assert_eq!(coverage(&empty, &front).unwrap(), 0);

        // prefix-ones blocks: i ones then zeros in block 1, j in block 2
        let mut pop = Vec::new();
        for i in 0..=4 {
            for j in 0..=4 {
                let bits: Vec<bool> = (0..8).map(|p| if p < 4 { p < i } else { p - 4 < j }).collect();
                pop.push(Individual::evaluated(BitString::from_bits(&bits), &b).unwrap());
            }
        }
        assert_eq!(coverage(&pop, &front).unwrap(), 25);
        let copies = vec![pop[3].clone(); 50];
        assert_eq!(coverage(&copies, &front).unwrap(), 1);
        assert!(coverage(&[ov(&[1, 1, 1])], &front).is_err());
    }

    #[test]
    fn coverage_matches_naive_set_count() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for b in [Benchmark::momm(12, 4).unwrap(), Benchmark::three_omm(12).unwrap()] {
            let pop: Vec<_> = (0..60).map(|_| b.evaluate(&BitString::random(12, &mut rng)).unwrap()).collect();
            let naive: BTreeSet<_> = pop.iter().collect();
            assert_eq!(coverage(&pop, &b.front()).unwrap(), naive.len());
            let mut c = CoverageCounter::new(b.front());
            c.extend(&pop).unwrap();
            let idx: BTreeSet<_> = pop.iter().map(|v| b.front().index_of(v).unwrap()).collect();
            assert_eq!(c.covered_indices().collect::<BTreeSet<_>>(), idx);
            c.clear();
            assert_eq!(c.count(), 0);
        }
    }

    #[test]
    fn neighbor_examples() {
        let front = Benchmark::momm(8, 4).unwrap().front();
        assert_eq!(
            neighbors(&ov(&[0, 4, 2, 2]), &front).unwrap(),
            vec![ov(&[1, 3, 2, 2]), ov(&[0, 4, 1, 3]), ov(&[0, 4, 3, 1])]
        );
        assert_eq!(neighbors(&ov(&[0, 4, 0, 4]), &front).unwrap().len(), 2);
        assert_eq!(neighbors(&ov(&[2, 2, 1, 3]), &front).unwrap().len(), 4);
        assert!(neighbors(&ov(&[0, 3, 0, 4]), &front).is_err());
        let front = Benchmark::momm(18, 6).unwrap().front();
        assert_eq!(neighbors(&ov(&[1, 5, 2, 4, 3, 3]), &front).unwrap().len(), 6);
    }

    #[test]
    fn neighbor_relation_is_symmetric_and_bounded() {
        for b in [
            Benchmark::momm(6, 2).unwrap(),
            Benchmark::momm(12, 4).unwrap(),
            Benchmark::momm(18, 6).unwrap(),
            Benchmark::three_omm(12).unwrap(),
        ] {
            let front = b.front();
            let all = front.enumerate().unwrap();
            let max = if b.id() == "3omm" { 4 } else { b.objectives() };
            for v in &all {
                let nv = neighbors(v, &front).unwrap();
                assert!(!nv.is_empty() && nv.len() <= max);
                for w in &nv {
                    assert!(neighbors(w, &front).unwrap().contains(v));
                }
            }
        }
    }

    #[test]
    fn summary_examples() {
        let s = summarize(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((s.mean, s.std), (5.0, 0.0));
        let s = summarize(&[0.0, 10.0]).unwrap();
        assert_eq!((s.mean, s.std, s.min, s.max), (5.0, 5.0, 0.0, 10.0));
        assert!(summarize(&[]).is_err());
    }

    proptest! {
        #[test]
        fn summary_matches_two_pass_formula(values in prop::collection::vec(-1e6f64..1e6, 1..300)) {
            let s = summarize(&values).unwrap();
            prop_assert!(s.min <= s.mean && s.mean <= s.max && s.std >= 0.0);
            // independent route: E[x^2] - E[x]^2 with compensated sums
            let n = values.len() as f64;
            let mean = values.iter().map(|&x| x / n).sum::<f64>();
            let var = values.iter().map(|&x| x * x / n).sum::<f64>() - mean * mean;
            let scale = values.iter().fold(1.0f64, |a, &x| a.max(x.abs()));
            prop_assert!((s.mean - mean).abs() <= 1e-9 * scale);
            prop_assert!((s.std * s.std - var.max(0.0)).abs() <= 1e-6 * scale * scale);
        }
    }
}
