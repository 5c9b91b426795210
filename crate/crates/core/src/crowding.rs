//! Crowding distance and the positive-distance diagnostics.
//!
//! For each objective the set is sorted by descending value, ties broken by
//! ascending input index. The first and last individual of each sorted order
//! get `+inf`; every interior individual accumulates the normalized gap
//! between its two sort neighbours. When an objective takes a single value
//! over the whole set, interior contributions for that objective are zero.
//!
//! Only the first and last member of a run of equal values can receive a
//! positive contribution, so at most `2 * sum(nu_i)` individuals have a
//! positive distance, where `nu_i` is the number of distinct values of
//! objective `i`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::solution::ObjectiveVector;

/// Distances assigned to a set of individuals, in input order.
#[derive(Clone, Debug, PartialEq)]
pub struct CrowdingAssignment {
    distances: Vec<f64>,
    positive_count: usize,
}

impl CrowdingAssignment {
    fn new(distances: Vec<f64>) -> Self {
        let positive_count = distances.iter().filter(|&&d| d > 0.0).count();
        Self { distances, positive_count }
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// Number of entries that are strictly positive, `+inf` included.
    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn into_distances(self) -> Vec<f64> {
        self.distances
    }
}

/// Normalized gap contributed to an interior individual.
#[inline]
pub(crate) fn gap(prev: u32, next: u32, range: u32) -> f64 {
    f64::from(prev - next) / f64::from(range)
}

/// Sorts `order` by descending `value(i)`, ties by ascending index.
///
/// A counting sort is used when the value range is small compared to the
/// set, which is the common case on the OneMinMax family; both paths produce
/// the same order.
pub(crate) fn sort_descending(order: &mut [usize], value: impl Fn(usize) -> u32) {
    let len = order.len();
    if len < 2 {
        return;
    }
    let (lo, hi) = order
        .iter()
        .fold((u32::MAX, 0u32), |(lo, hi), &i| (lo.min(value(i)), hi.max(value(i))));
    let span = (hi - lo) as usize;
    if span <= 4 * len {
        let mut indices = order.to_vec();
        indices.sort_unstable();
        let mut counts = vec![0usize; span + 2];
        for &i in &indices {
            counts[(hi - value(i)) as usize + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        for &i in &indices {
            let bucket = (hi - value(i)) as usize;
            order[counts[bucket]] = i;
            counts[bucket] += 1;
        }
    } else {
        order.sort_unstable_by_key(|&i| (core::cmp::Reverse(value(i)), i));
    }
}

fn check_set<T: AsRef<ObjectiveVector>>(set: &[T], m: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::InvalidInput("crowding distance of an empty set".into()));
    }
    if let Some(bad) = set.iter().find(|s| s.as_ref().len() != m) {
        return Err(Error::LengthMismatch { expected: m, found: bad.as_ref().len() });
    }
    Ok(())
}

/// Crowding distance of every member of `set` with respect to `m`
/// objectives.
///
/// The set is assumed to be pairwise non-dominated; this is not checked.
pub fn crowding_distance<T: AsRef<ObjectiveVector>>(set: &[T], m: usize) -> Result<CrowdingAssignment> {
    check_set(set, m)?;
    let len = set.len();
    let mut distances = vec![0.0f64; len];
    let mut order: Vec<usize> = (0..len).collect();
    for obj in 0..m {
        let value = |i: usize| set[i].as_ref().get(obj);
        sort_descending(&mut order, value);
        let (first, last) = (order[0], order[len - 1]);
        distances[first] = f64::INFINITY;
        distances[last] = f64::INFINITY;
        let range = value(first) - value(last);
        if range == 0 {
            continue;
        }
        for j in 1..len.saturating_sub(1) {
            distances[order[j]] += gap(value(order[j - 1]), value(order[j + 1]), range);
        }
    }
    Ok(CrowdingAssignment::new(distances))
}

/// Number of members of `set` with a strictly positive crowding distance.
pub fn positive_crowding_count<T: AsRef<ObjectiveVector>>(set: &[T], m: usize) -> Result<usize> {
    crowding_distance(set, m).map(|a| a.positive_count())
}

/// Upper bound `2 * sum(nu_i)` on the number of positive crowding distances
/// for a set whose objective `i` takes `nu_i` distinct values.
pub fn positive_count_bound(value_counts: &[usize]) -> usize {
    debug_assert!(value_counts.iter().all(|&nu| nu >= 1), "value counts must be positive");
    2 * value_counts.iter().sum::<usize>()
}

/// Number of distinct values of each objective over `set`.
pub fn distinct_value_counts<T: AsRef<ObjectiveVector>>(set: &[T], m: usize) -> Vec<usize> {
    (0..m)
        .map(|obj| set.iter().map(|s| s.as_ref().get(obj)).collect::<BTreeSet<_>>().len())
        .collect()
}
