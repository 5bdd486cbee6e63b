use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Symmetric distance matrix with zero diagonal.
///
/// The triangle inequality is not required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspInstance {
    n: usize,
    distances: Vec<f64>,
    pub label: String,
}

impl TspInstance {
    /// From a row-major `n × n` matrix.
    pub fn from_matrix(n: usize, distances: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("a tour needs at least 3 cities, got {n}")));
        }
        if distances.len() != n * n {
            return Err(Error::SizeMismatch { expected: n * n, got: distances.len() });
        }
        for i in 0..n {
            if distances[i * n + i] != 0.0 {
                return Err(Error::InvalidParameter(format!("d[{i}][{i}] must be zero")));
            }
            for j in i + 1..n {
                let (a, b) = (distances[i * n + j], distances[j * n + i]);
                if a != b || !(a >= 0.0 && a.is_finite()) {
                    return Err(Error::InvalidParameter(format!("d[{i}][{j}] = {a}, d[{j}][{i}] = {b}")));
                }
            }
        }
        Ok(Self { n, distances, label: label.into() })
    }

    /// Euclidean distances between points.
    pub fn from_points(points: &[(f64, f64)], label: impl Into<String>) -> Result<Self> {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d[i * n + j] = (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1);
                }
            }
        }
        Self::from_matrix(n, d, label)
    }

    pub fn n_cities(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.n + j]
    }

    /// Mean and population standard deviation of the off-diagonal entries.
    pub fn distance_stats(&self) -> (f64, f64) {
        let vals: Vec<f64> = (0..self.n)
            .flat_map(|i| (0..self.n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.distance(i, j))
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        (mean, var.sqrt())
    }

    /// Multiply every distance so that the off-diagonal mean equals `mean`.
    pub fn rescaled_to_mean(mut self, mean: f64) -> Self {
        let (current, _) = self.distance_stats();
        if current > 0.0 {
            let f = mean / current;
            self.distances.iter_mut().for_each(|d| *d *= f);
        }
        self
    }
}

/// A closed route; stop 0 always holds city 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tour(Vec<usize>);

impl Tour {
    /// `order[a]` is the city at stop `a`; must be a permutation with `order[0] = 0`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        check_permutation(&order)?;
        if order[0] != 0 {
            return Err(Error::InvalidParameter("the first stop must be city 0".into()));
        }
        Ok(Self(order))
    }

    /// Rotate any cyclic order so that city 0 comes first.
    pub fn from_cycle(mut order: Vec<usize>) -> Result<Self> {
        check_permutation(&order)?;
        let pos = order.iter().position(|&c| c == 0).expect("permutation contains 0");
        order.rotate_left(pos);
        Ok(Self(order))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn random(n: usize, rng: &mut Rng) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order[1..].shuffle(rng);
        Self(order)
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Same cycle traversed backwards (still starting at city 0).
    pub fn reversed(&self) -> Self {
        let mut order = self.0.clone();
        order[1..].reverse();
        Self(order)
    }

    pub(crate) fn swap_stops(&mut self, a: usize, b: usize) {
        debug_assert!(a != 0 && b != 0);
        self.0.swap(a, b);
    }
}

pub(crate) fn check_permutation(order: &[usize]) -> Result<()> {
    let n = order.len();
    let mut seen = vec![false; n];
    for &c in order {
        if c >= n || std::mem::replace(&mut seen[c], true) {
            return Err(Error::InvalidParameter(format!("{order:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// `Σ_m d(order[m], order[m+1])`, closing the cycle.
pub fn tour_length(instance: &TspInstance, tour: &Tour) -> Result<f64> {
    if tour.len() != instance.n_cities() {
        return Err(Error::SizeMismatch { expected: instance.n_cities(), got: tour.len() });
    }
    Ok(cycle_length(instance, tour.order()))
}

pub(crate) fn cycle_length(instance: &TspInstance, order: &[usize]) -> f64 {
    let n = order.len();
    (0..n).map(|m| instance.distance(order[m], order[(m + 1) % n])).sum()
}

/// Length change when the cities at stops `a != b` are exchanged.
pub(crate) fn swap_delta(instance: &TspInstance, order: &[usize], a: usize, b: usize) -> f64 {
    let n = order.len();
    // Edge e joins stops e and e+1; only edges touching a or b change.
    let mut edges = [(a + n - 1) % n, a, (b + n - 1) % n, b];
    edges.sort_unstable();
    let city_after = |s: usize| {
        if s == a {
            order[b]
        } else if s == b {
            order[a]
        } else {
            order[s]
        }
    };
    let mut delta = 0.0;
    let mut last = usize::MAX;
    for &e in &edges {
        if e == last {
            continue;
        }
        last = e;
        let f = (e + 1) % n;
        delta += instance.distance(city_after(e), city_after(f)) - instance.distance(order[e], order[f]);
    }
    delta
}
