//! Search points, objective vectors and Pareto dominance (maximization).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::benchmarks::Benchmark;
use crate::error::{check_len, Error, Result};

const WORD: usize = 64;

/// A fixed-length string of bits, packed into 64-bit words.
///
/// Positions are 0-based here; position `i` corresponds to `x_{i+1}` in the
/// usual 1-based notation. Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(WORD)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self { len, words: vec![u64::MAX; len.div_ceil(WORD)] };
        s.clear_tail();
        s
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    /// Uniformly random bit string of the given length.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut s = Self { len, words: (0..len.div_ceil(WORD)).map(|_| rng.random()).collect() };
        s.clear_tail();
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at 0-based position `i`. Panics when out of range.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Number of ones in the half-open position range `start..end`.
    pub fn count_ones_in(&self, start: usize, end: usize) -> usize {
        assert!(start <= end && end <= self.len, "range {start}..{end} out of bounds");
        if start == end {
            return 0;
        }
        let (first, last) = (start / WORD, (end - 1) / WORD);
        let mut total = 0usize;
        for w in first..=last {
            let mut word = self.words[w];
            if w == first {
                word &= u64::MAX << (start % WORD);
            }
            if w == last {
                let hi = end - last * WORD;
                if hi < WORD {
                    word &= (1u64 << hi) - 1;
                }
            }
            total += word.count_ones() as usize;
        }
        total
    }

    pub fn complement(&self) -> Self {
        let mut s = Self { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        s.clear_tail();
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Copies positions `start..end` from `other` into `self`.
    pub(crate) fn copy_range_from(&mut self, other: &BitString, start: usize, end: usize) {
        debug_assert_eq!(self.len, other.len);
        for i in start..end {
            self.set(i, other.get(i));
        }
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses a string of `0` and `1` characters; the first character is
    /// position 0.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Self::zeros(s.len());
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => out.set(i, true),
                other => {
                    return Err(Error::InvalidInput(alloc::format!(
                        "bit strings may only contain '0' and '1', found {:?}",
                        other as char
                    )))
                }
            }
        }
        Ok(out)
    }
}

/// Number of positions at which two equal-length bit strings differ.
pub fn hamming_distance(x: &BitString, y: &BitString) -> Result<usize> {
    check_len(x.len(), y.len())?;
    Ok(x.words.iter().zip(&y.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum())
}

/// The image `f(x)` of a search point: one nonnegative integer per objective.
///
/// The derived `Ord` is lexicographic and only used for grouping equal
/// vectors; it is unrelated to dominance.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectiveVector(Vec<u32>);

impl ObjectiveVector {
    pub fn new(values: Vec<u32>) -> Self {
        Self(values)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

impl From<Vec<u32>> for ObjectiveVector {
    fn from(values: Vec<u32>) -> Self {
        Self(values)
    }
}

impl From<&[u32]> for ObjectiveVector {
    fn from(values: &[u32]) -> Self {
        Self(values.to_vec())
    }
}

impl<const K: usize> From<[u32; K]> for ObjectiveVector {
    fn from(values: [u32; K]) -> Self {
        Self(values.to_vec())
    }
}

impl AsRef<ObjectiveVector> for ObjectiveVector {
    fn as_ref(&self) -> &ObjectiveVector {
        self
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `u` weakly dominates `v` when `u[i] >= v[i]` for every objective.
pub fn weakly_dominates(u: &ObjectiveVector, v: &ObjectiveVector) -> Result<bool> {
    check_len(u.len(), v.len())?;
    Ok(weakly_dominates_slice(u.as_slice(), v.as_slice()))
}

/// `u` strictly dominates `v` when it weakly dominates it and differs from it.
pub fn strictly_dominates(u: &ObjectiveVector, v: &ObjectiveVector) -> Result<bool> {
    check_len(u.len(), v.len())?;
    Ok(strictly_dominates_slice(u.as_slice(), v.as_slice()))
}

#[inline]
pub(crate) fn weakly_dominates_slice(u: &[u32], v: &[u32]) -> bool {
    u.iter().zip(v).all(|(a, b)| a >= b)
}

#[inline]
pub(crate) fn strictly_dominates_slice(u: &[u32], v: &[u32]) -> bool {
    let mut strict = false;
    for (a, b) in u.iter().zip(v) {
        if a < b {
            return false;
        }
        strict |= a > b;
    }
    strict
}

/// A search point with its cached objective vector and a crowding-distance
/// slot.
///
/// The crowding distance is an `f64` that is either finite and nonnegative
/// or `f64::INFINITY`; IEEE arithmetic gives `inf + x = inf` and orders
/// infinity above every finite value.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    genotype: BitString,
    objectives: ObjectiveVector,
    crowding: f64,
}

impl Individual {
    /// Evaluates `genotype` under `benchmark` and caches the result.
    pub fn evaluated(genotype: BitString, benchmark: &Benchmark) -> Result<Self> {
        let objectives = benchmark.evaluate(&genotype)?;
        Ok(Self { genotype, objectives, crowding: 0.0 })
    }

    /// Builds an individual from an already computed objective vector. The
    /// caller is responsible for the vector matching the genotype.
    pub fn from_parts(genotype: BitString, objectives: ObjectiveVector) -> Self {
        Self { genotype, objectives, crowding: 0.0 }
    }

    #[inline]
    pub fn genotype(&self) -> &BitString {
        &self.genotype
    }

    #[inline]
    pub fn objectives(&self) -> &ObjectiveVector {
        &self.objectives
    }

    #[inline]
    pub fn crowding(&self) -> f64 {
        self.crowding
    }

    #[inline]
    pub fn set_crowding(&mut self, distance: f64) {
        debug_assert!(distance >= 0.0, "crowding distance must be nonnegative");
        self.crowding = distance;
    }
}

impl AsRef<ObjectiveVector> for Individual {
    fn as_ref(&self) -> &ObjectiveVector {
        &self.objectives
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn ov(v: &[u32]) -> ObjectiveVector {
        ObjectiveVector::from(v)
    }

    #[test]
    fn weak_dominance_examples() {
        assert!(weakly_dominates(&ov(&[3, 3]), &ov(&[3, 3])).unwrap());
        assert!(weakly_dominates(&ov(&[2, 3]), &ov(&[1, 3])).unwrap());
        assert!(!weakly_dominates(&ov(&[1, 2]), &ov(&[2, 1])).unwrap());
    }

    #[test]
    fn strict_dominance_examples() {
        assert!(strictly_dominates(&ov(&[2, 3]), &ov(&[1, 3])).unwrap());
        assert!(!strictly_dominates(&ov(&[3, 3]), &ov(&[3, 3])).unwrap());
        assert!(!strictly_dominates(&ov(&[1, 2]), &ov(&[2, 1])).unwrap());
    }

    #[test]
    fn dominance_rejects_length_mismatch() {
        let err = weakly_dominates(&ov(&[1, 2]), &ov(&[1, 2, 3])).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { expected: 2, found: 3 });
        assert!(strictly_dominates(&ov(&[1]), &ov(&[])).is_err());
    }

    fn all_vectors(m: usize, max: u32) -> Vec<ObjectiveVector> {
        let mut out = vec![ObjectiveVector::new(Vec::new())];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..=max).map(move |x| {
                        let mut w = v.as_slice().to_vec();
                        w.push(x);
                        ObjectiveVector::new(w)
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn strict_dominance_is_a_strict_partial_order() {
        for m in 1..=3 {
            let all = all_vectors(m, 3);
            for u in &all {
                assert!(!strictly_dominates(u, u).unwrap());
                for v in &all {
                    let uv = weakly_dominates(u, v).unwrap();
                    let vu = weakly_dominates(v, u).unwrap();
                    assert_eq!(uv && vu, u == v);
                }
            }
            for u in &all {
                for v in all.iter().filter(|v| strictly_dominates(u, v).unwrap()) {
                    for w in all.iter().filter(|w| strictly_dominates(v, w).unwrap()) {
                        assert!(strictly_dominates(u, w).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn hamming_examples() {
        let z: BitString = "0000".parse().unwrap();
        let o: BitString = "1111".parse().unwrap();
        assert_eq!(hamming_distance(&z, &z).unwrap(), 0);
        assert_eq!(hamming_distance(&z, &o).unwrap(), 4);
        let a: BitString = "1100".parse().unwrap();
        let b: BitString = "1010".parse().unwrap();
        assert_eq!(hamming_distance(&a, &b).unwrap(), 2);
        assert!(hamming_distance(&a, &"10".parse().unwrap()).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let s = "1100101000011";
        let b: BitString = s.parse().unwrap();
        assert_eq!(std::format!("{b}"), s);
        assert_eq!(b.count_ones(), 6);
        assert!("10x1".parse::<BitString>().is_err());
    }

    #[test]
    fn range_counts_across_word_boundaries() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for len in [1usize, 40, 63, 64, 65, 130, 200] {
            let b = BitString::random(len, &mut rng);
            assert_eq!(b.count_ones() + b.count_zeros(), len);
            assert_eq!(b.complement().count_ones(), b.count_zeros());
            for start in 0..=len.min(70) {
                for end in (start..=len).step_by(7) {
                    let naive = (start..end).filter(|&i| b.get(i)).count();
                    assert_eq!(b.count_ones_in(start, end), naive, "len {len} {start}..{end}");
                }
            }
        }
    }

    #[test]
    fn ones_and_random_keep_tail_clear() {
        let o = BitString::ones(70);
        assert_eq!(o.count_ones(), 70);
        assert_eq!(o, BitString::zeros(70).complement());
    }
}
