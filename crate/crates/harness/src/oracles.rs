//! Slow, obviously-correct reference implementations used by `verify`.

use moea_core::ObjectiveVector;

/// Strict dominance, written out without the core helpers.
fn beats(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
}

/// Fronts by repeated peeling of the non-dominated members, each front in
/// ascending index order.
pub fn peeling_sort(population: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..population.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let (front, rest): (Vec<usize>, Vec<usize>) = remaining.iter().partition(|&&i| {
            !remaining.iter().any(|&j| beats(population[j].as_slice(), population[i].as_slice()))
        });
        fronts.push(front);
        remaining = rest;
    }
    fronts
}

/// Crowding distance computed directly from its definition: per objective,
/// a stable descending sort, infinite boundaries, normalized neighbour gaps.
pub fn straight_crowding(set: &[ObjectiveVector], m: usize) -> Vec<f64> {
    let len = set.len();
    let mut dist = vec![0.0; len];
    for k in 0..m {
        let mut order: Vec<usize> = (0..len).collect();
        // stable, so equal values keep ascending index order
        order.sort_by(|&a, &b| set[b].as_slice()[k].cmp(&set[a].as_slice()[k]));
        let top = set[order[0]].as_slice()[k] as f64;
        let bottom = set[order[len - 1]].as_slice()[k] as f64;
        dist[order[0]] = f64::INFINITY;
        dist[order[len - 1]] = f64::INFINITY;
        if top == bottom {
            continue;
        }
        for j in 1..len - 1 {
            let prev = set[order[j - 1]].as_slice()[k] as f64;
            let next = set[order[j + 1]].as_slice()[k] as f64;
            dist[order[j]] += (prev - next) / (top - bottom);
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ovs(vs: &[&[u32]]) -> Vec<ObjectiveVector> {
        vs.iter().map(|v| ObjectiveVector::from(*v)).collect()
    }

    #[test]
    fn peeling_by_hand() {
        let pop = ovs(&[&[1, 1], &[3, 0], &[0, 3], &[2, 2], &[0, 0]]);
        assert_eq!(peeling_sort(&pop), vec![vec![1, 2, 3], vec![0], vec![4]]);
    }

    #[test]
    fn straight_crowding_by_hand() {
        // f1 order: 3,2,1,0 -> interior gaps (3-1)/3 and (2-0)/3
        let set = ovs(&[&[0, 3], &[1, 2], &[2, 1], &[3, 0]]);
        let d = straight_crowding(&set, 2);
        assert_eq!(d[0], f64::INFINITY);
        assert_eq!(d[3], f64::INFINITY);
        assert!((d[1] - 4.0 / 3.0).abs() < 1e-15);
        assert!((d[2] - 4.0 / 3.0).abs() < 1e-15);
    }
}
