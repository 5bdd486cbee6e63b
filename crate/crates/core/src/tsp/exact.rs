use super::instance::cycle_length;
use super::{Tour, TspInstance};
use crate::error::{Error, Result};

/// Largest instance [`exhaustive_optimal`] enumerates.
pub const MAX_EXHAUSTIVE_CITIES: usize = 12;
/// Largest instance [`held_karp_length`] accepts.
pub const MAX_HELD_KARP_CITIES: usize = 18;

/// Outcome of a full enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalTours {
    pub length: f64,
    /// Minimal tours, one orientation each.
    pub tours: Vec<Tour>,
    /// Tours examined: `(N-1)!/2`.
    pub visited: u64,
}

/// Enumerate every tour with city 0 first and `order[1] < order[N-1]`,
/// which lists each undirected cycle once.
pub fn exhaustive_optimal(instance: &TspInstance) -> Result<OptimalTours> {
    let n = instance.n_cities();
    if n > MAX_EXHAUSTIVE_CITIES {
        return Err(Error::SizeLimit { what: "exhaustive TSP enumeration", limit: MAX_EXHAUSTIVE_CITIES, got: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = OptimalTours { length: f64::INFINITY, tours: Vec::new(), visited: 0 };
    permute(instance, &mut order, 1, &mut best);
    Ok(best)
}

fn permute(instance: &TspInstance, order: &mut Vec<usize>, k: usize, best: &mut OptimalTours) {
    let n = order.len();
    if k == n {
        if order[1] > order[n - 1] {
            return;
        }
        best.visited += 1;
        let len = cycle_length(instance, order);
        let tol = 1e-9 * (1.0 + best.length.abs().min(len.abs()));
        if len < best.length - tol {
            best.length = len;
            best.tours.clear();
        }
        if (len - best.length).abs() <= tol {
            best.tours.push(Tour::new(order.clone()).expect("permutation with city 0 first"));
        }
        return;
    }
    for i in k..n {
        order.swap(k, i);
        permute(instance, order, k + 1, best);
        order.swap(k, i);
    }
}

/// Optimal tour length by the Held-Karp dynamic program,
/// `O(2^N N²)` time; an independent check on the enumeration and the
/// reference for 16-city instances.
pub fn held_karp_length(instance: &TspInstance) -> Result<f64> {
    let n = instance.n_cities();
    if n > MAX_HELD_KARP_CITIES {
        return Err(Error::SizeLimit { what: "Held-Karp dynamic program", limit: MAX_HELD_KARP_CITIES, got: n });
    }
    // Subsets of cities 1..n encoded on bits 0..n-1; cost[S][j] ends at city j+1.
    let m = n - 1;
    let full = 1usize << m;
    let mut cost = vec![f64::INFINITY; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = instance.distance(0, j + 1);
    }
    for set in 1..full {
        for j in 0..m {
            if set & (1 << j) == 0 {
                continue;
            }
            let c = cost[set * m + j];
            if !c.is_finite() {
                continue;
            }
            for k in 0..m {
                if set & (1 << k) != 0 {
                    continue;
                }
                let next = set | (1 << k);
                let cand = c + instance.distance(j + 1, k + 1);
                if cand < cost[next * m + k] {
                    cost[next * m + k] = cand;
                }
            }
        }
    }
    Ok((0..m)
        .map(|j| cost[(full - 1) * m + j] + instance.distance(j + 1, 0))
        .fold(f64::INFINITY, f64::min))
}
