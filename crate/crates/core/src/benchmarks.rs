//! The m-objective OneMinMax family and 3-OneMinMax.
//!
//! On both benchmarks every bit string is Pareto optimal, and the Pareto
//! front is a grid over a few "free" coordinates, each ranging over
//! `0..=n'`:
//!
//! - mOneMinMax: the zero counts `(f_1, f_3, ..., f_{m-1})` of the `m/2`
//!   blocks; the ones counts are their complements `n' - f_{2k-1}`.
//! - 3-OneMinMax: the half-string ones counts `(f_2, f_3)`, with
//!   `f_1 = n - f_2 - f_3`.
//!
//! Front points are enumerated and indexed in lexicographic order of the
//! free coordinates, first coordinate most significant.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::solution::{BitString, ObjectiveVector};

/// Largest front [`ParetoFront::enumerate`] will materialize.
pub const ENUMERATION_LIMIT: usize = 100_000_000;

/// m-objective OneMinMax: `m/2` independent bi-objective OneMinMax blocks of
/// length `n' = 2n/m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MommBenchmark {
    n: usize,
    m: usize,
}

impl MommBenchmark {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::Config(format!("mOneMinMax needs an even m >= 2, got m = {m}")));
        }
        if n == 0 || !n.is_multiple_of(m / 2) {
            return Err(Error::Config(format!(
                "mOneMinMax needs n to be a positive multiple of m/2 = {}, got n = {n}",
                m / 2
            )));
        }
        let b = Self { n, m };
        front_size_checked(b.block_len(), m / 2)?;
        Ok(b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Block length `n' = 2n/m`.
    pub fn block_len(&self) -> usize {
        2 * self.n / self.m
    }

    pub fn evaluate(&self, x: &BitString) -> Result<ObjectiveVector> {
        check_len(self.n, x.len())?;
        let np = self.block_len();
        let mut values = Vec::with_capacity(self.m);
        for block in 0..self.m / 2 {
            let ones = x.count_ones_in(block * np, (block + 1) * np);
            values.push((np - ones) as u32);
            values.push(ones as u32);
        }
        Ok(ObjectiveVector::new(values))
    }
}

/// 3-OneMinMax: total zeros, ones in the first half, ones in the second
/// half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThreeOmmBenchmark {
    n: usize,
}

impl ThreeOmmBenchmark {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!("3-OneMinMax needs a positive even n, got n = {n}")));
        }
        front_size_checked(n / 2, 2)?;
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_len(&self) -> usize {
        self.n / 2
    }

    pub fn evaluate(&self, x: &BitString) -> Result<ObjectiveVector> {
        check_len(self.n, x.len())?;
        let half = self.half_len();
        let first = x.count_ones_in(0, half);
        let second = x.count_ones_in(half, self.n);
        let zeros = self.n - first - second;
        Ok(ObjectiveVector::new(vec![zeros as u32, first as u32, second as u32]))
    }
}

fn front_size_checked(side: usize, dims: usize) -> Result<usize> {
    (side + 1)
        .checked_pow(dims as u32)
        .ok_or_else(|| Error::Config(format!("Pareto front size ({}^{dims}) overflows", side + 1)))
}

/// A benchmark instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Momm(MommBenchmark),
    ThreeOmm(ThreeOmmBenchmark),
}

impl Benchmark {
    pub fn momm(n: usize, m: usize) -> Result<Self> {
        MommBenchmark::new(n, m).map(Self::Momm)
    }

    pub fn three_omm(n: usize) -> Result<Self> {
        ThreeOmmBenchmark::new(n).map(Self::ThreeOmm)
    }

    /// Short identifier used on the command line: `momm` or `3omm`.
    pub fn id(&self) -> &'static str {
        match self {
            Self::Momm(_) => "momm",
            Self::ThreeOmm(_) => "3omm",
        }
    }

    /// Problem size (number of bits).
    pub fn n(&self) -> usize {
        match self {
            Self::Momm(b) => b.n(),
            Self::ThreeOmm(b) => b.n(),
        }
    }

    /// Number of objectives.
    pub fn objectives(&self) -> usize {
        match self {
            Self::Momm(b) => b.m(),
            Self::ThreeOmm(_) => 3,
        }
    }

    pub fn evaluate(&self, x: &BitString) -> Result<ObjectiveVector> {
        match self {
            Self::Momm(b) => b.evaluate(x),
            Self::ThreeOmm(b) => b.evaluate(x),
        }
    }

    pub fn front(&self) -> ParetoFront {
        ParetoFront { benchmark: *self }
    }
}

/// Describes the Pareto front of a benchmark and provides a dense,
/// bijective indexing `front point <-> 0..size()`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParetoFront {
    benchmark: Benchmark,
}

impl ParetoFront {
    pub fn benchmark(&self) -> &Benchmark {
        &self.benchmark
    }

    /// `(n'+1)^(m/2)` for mOneMinMax, `(n/2+1)^2` for 3-OneMinMax.
    pub fn size(&self) -> usize {
        (self.side() as usize + 1).pow(self.free_dims() as u32)
    }

    /// Number of free coordinates of a front point.
    pub fn free_dims(&self) -> usize {
        match self.benchmark {
            Benchmark::Momm(b) => b.m() / 2,
            Benchmark::ThreeOmm(_) => 2,
        }
    }

    /// Upper end of every free coordinate's range `0..=side`.
    pub fn side(&self) -> u32 {
        match self.benchmark {
            Benchmark::Momm(b) => b.block_len() as u32,
            Benchmark::ThreeOmm(b) => b.half_len() as u32,
        }
    }

    /// Number of distinct values each objective takes over the front.
    pub fn value_counts(&self) -> Vec<usize> {
        match self.benchmark {
            Benchmark::Momm(b) => vec![b.block_len() + 1; b.m()],
            Benchmark::ThreeOmm(b) => vec![b.n() + 1, b.half_len() + 1, b.half_len() + 1],
        }
    }

    /// Free coordinates of `v`, or an error when `v` is not a front point.
    pub fn free_coordinates(&self, v: &ObjectiveVector) -> Result<Vec<u32>> {
        check_len(self.benchmark.objectives(), v.len())?;
        let side = self.side();
        let values = v.as_slice();
        let off_front = || Error::InvalidInput(format!("{v} is not on the Pareto front"));
        match self.benchmark {
            Benchmark::Momm(_) => values
                .chunks_exact(2)
                .map(|pair| {
                    if pair[0] <= side && pair[0] as u64 + pair[1] as u64 == side as u64 {
                        Ok(pair[0])
                    } else {
                        Err(off_front())
                    }
                })
                .collect(),
            Benchmark::ThreeOmm(b) => {
                let (v1, v2, v3) = (values[0] as u64, values[1], values[2]);
                if v2 <= side && v3 <= side && v1 + v2 as u64 + v3 as u64 == b.n() as u64 {
                    Ok(vec![v2, v3])
                } else {
                    Err(off_front())
                }
            }
        }
    }

    /// Front point with the given free coordinates. Coordinates must be in
    /// range.
    pub fn from_free_coordinates(&self, free: &[u32]) -> ObjectiveVector {
        debug_assert_eq!(free.len(), self.free_dims());
        let side = self.side();
        match self.benchmark {
            Benchmark::Momm(_) => {
                ObjectiveVector::new(free.iter().flat_map(|&i| [i, side - i]).collect())
            }
            Benchmark::ThreeOmm(b) => {
                ObjectiveVector::new(vec![b.n() as u32 - free[0] - free[1], free[0], free[1]])
            }
        }
    }

    pub fn contains(&self, v: &ObjectiveVector) -> bool {
        self.free_coordinates(v).is_ok()
    }

    /// Rank of `v` in enumeration order.
    pub fn index_of(&self, v: &ObjectiveVector) -> Result<usize> {
        check_len(self.benchmark.objectives(), v.len())?;
        let side = self.side();
        let radix = side as usize + 1;
        let values = v.as_slice();
        let on_front = match self.benchmark {
            Benchmark::Momm(_) => values.chunks_exact(2).try_fold(0usize, |acc, pair| {
                (pair[0] <= side && pair[0] as u64 + pair[1] as u64 == side as u64)
                    .then(|| acc * radix + pair[0] as usize)
            }),
            Benchmark::ThreeOmm(b) => {
                let (v2, v3) = (values[1], values[2]);
                (v2 <= side && v3 <= side && values[0] as u64 + v2 as u64 + v3 as u64 == b.n() as u64)
                    .then(|| v2 as usize * radix + v3 as usize)
            }
        };
        on_front.ok_or_else(|| Error::InvalidInput(format!("{v} is not on the Pareto front")))
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn point(&self, index: usize) -> Result<ObjectiveVector> {
        if index >= self.size() {
            return Err(Error::InvalidInput(format!(
                "front index {index} out of range 0..{}",
                self.size()
            )));
        }
        let radix = self.side() as usize + 1;
        let mut free = vec![0u32; self.free_dims()];
        let mut rest = index;
        for slot in free.iter_mut().rev() {
            *slot = (rest % radix) as u32;
            rest /= radix;
        }
        Ok(self.from_free_coordinates(&free))
    }

    /// Every front point exactly once, in index order.
    pub fn enumerate(&self) -> Result<Vec<ObjectiveVector>> {
        let size = self.size();
        if size > ENUMERATION_LIMIT {
            return Err(Error::Resource(format!(
                "front of size {size} exceeds the enumeration limit {ENUMERATION_LIMIT}"
            )));
        }
        (0..size).map(|i| self.point(i)).collect()
    }
}
