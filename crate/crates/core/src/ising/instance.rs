use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the couplings of an instance are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    /// Every pair may interact; stored as a dense matrix.
    Complete,
    /// Nearest neighbours on a `side × side` square lattice.
    Square2D { side: usize, periodic: bool },
    /// Arbitrary sparse graph.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
enum Couplings {
    /// Row-major `n × n`, symmetric, zero diagonal.
    Dense(Vec<f64>),
    /// Adjacency lists sorted by neighbour index.
    Sparse(Vec<Vec<(usize, f64)>>),
}

/// An Ising problem: symmetric couplings plus a uniform longitudinal field.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    n: usize,
    couplings: Couplings,
    field_h: f64,
    topology: Topology,
}

impl IsingInstance {
    /// Build an instance from `(i, j, J_ij)` triples. Each unordered pair may
    /// appear once; `i == j` and out-of-range indices are rejected.
    pub fn from_pairs<I>(n: usize, pairs: I, field_h: f64, topology: Topology) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::InvalidParameter("instance needs at least one spin".into()));
        }
        if !field_h.is_finite() {
            return Err(Error::InvalidParameter(format!("field h = {field_h} is not finite")));
        }
        let mut map = BTreeMap::new();
        for (i, j, jij) in pairs {
            if i == j {
                return Err(Error::InvalidParameter(format!("self-coupling on spin {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "coupling ({i}, {j}) out of range for {n} spins"
                )));
            }
            if !jij.is_finite() {
                return Err(Error::InvalidParameter(format!("coupling ({i}, {j}) is not finite")));
            }
            let key = (i.min(j), i.max(j));
            if map.insert(key, jij).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "coupling ({}, {}) given twice",
                    key.0, key.1
                )));
            }
        }
        let couplings = match topology {
            Topology::Complete => {
                let mut dense = vec![0.0; n * n];
                for (&(i, j), &v) in &map {
                    dense[i * n + j] = v;
                    dense[j * n + i] = v;
                }
                Couplings::Dense(dense)
            }
            Topology::Square2D { .. } | Topology::Custom => {
                let mut adj = vec![Vec::new(); n];
                for (&(i, j), &v) in &map {
                    adj[i].push((j, v));
                    adj[j].push((i, v));
                }
                for row in &mut adj {
                    row.sort_by_key(|&(j, _)| j);
                }
                Couplings::Sparse(adj)
            }
        };
        Ok(Self { n, couplings, field_h, topology })
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> f64 {
        self.field_h
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Same couplings, different longitudinal field.
    pub fn with_field(mut self, field_h: f64) -> Self {
        self.field_h = field_h;
        self
    }

    /// `J_ij`; zero when the pair does not interact.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        match &self.couplings {
            Couplings::Dense(m) => m[i * self.n + j],
            Couplings::Sparse(adj) => adj[i]
                .binary_search_by_key(&j, |&(k, _)| k)
                .map(|pos| adj[i][pos].1)
                .unwrap_or(0.0),
        }
    }

    /// All stored pairs with `i < j`, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        match &self.couplings {
            Couplings::Dense(m) => {
                for i in 0..self.n {
                    for j in i + 1..self.n {
                        out.push((i, j, m[i * self.n + j]));
                    }
                }
            }
            Couplings::Sparse(adj) => {
                for (i, row) in adj.iter().enumerate() {
                    out.extend(row.iter().filter(|&&(j, _)| j > i).map(|&(j, v)| (i, j, v)));
                }
            }
        }
        out
    }

    /// Number of stored pairs.
    pub fn bond_count(&self) -> usize {
        match &self.couplings {
            Couplings::Dense(_) => self.n * (self.n - 1) / 2,
            Couplings::Sparse(adj) => adj.iter().map(Vec::len).sum::<usize>() / 2,
        }
    }

    /// Number of interaction partners of spin `i` (O(1) work per partner
    /// in the Monte Carlo kernels).
    pub fn degree(&self, i: usize) -> usize {
        match &self.couplings {
            Couplings::Dense(_) => self.n - 1,
            Couplings::Sparse(adj) => adj[i].len(),
        }
    }

    /// `Σ_j J_ij s_j + h`: minus the derivative of the energy with respect to `s_i`.
    #[inline]
    pub fn local_field(&self, i: usize, spins: &[i8]) -> f64 {
        let exchange: f64 = match &self.couplings {
            Couplings::Dense(m) => m[i * self.n..(i + 1) * self.n]
                .iter()
                .zip(spins)
                .map(|(&j, &s)| j * f64::from(s))
                .sum(),
            Couplings::Sparse(adj) => adj[i].iter().map(|&(j, v)| v * f64::from(spins[j])).sum(),
        };
        exchange + self.field_h
    }

    /// Energy change when spin `i` of `spins` is flipped.
    #[inline]
    pub fn flip_delta(&self, i: usize, spins: &[i8]) -> f64 {
        2.0 * f64::from(spins[i]) * self.local_field(i, spins)
    }

    /// Energy of a raw spin slice; panics on a length mismatch.
    pub fn energy_of(&self, spins: &[i8]) -> f64 {
        assert_eq!(spins.len(), self.n, "spin vector length");
        let exchange: f64 = match &self.couplings {
            Couplings::Dense(m) => {
                let mut acc = 0.0;
                for i in 0..self.n {
                    let row = &m[i * self.n..(i + 1) * self.n];
                    let si = f64::from(spins[i]);
                    for j in i + 1..self.n {
                        acc += row[j] * si * f64::from(spins[j]);
                    }
                }
                acc
            }
            Couplings::Sparse(adj) => adj
                .iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().filter(move |&&(j, _)| j > i).map(move |&(j, v)| (i, j, v)))
                .map(|(i, j, v)| v * f64::from(spins[i]) * f64::from(spins[j]))
                .sum(),
        };
        let magnet: f64 = spins.iter().map(|&s| f64::from(s)).sum();
        -exchange - self.field_h * magnet
    }

    /// Energies of all `2^n` basis states, indexed as in
    /// [`SpinConfiguration::from_index`].
    pub fn diagonal_energies(&self) -> Vec<f64> {
        let dim = 1usize << self.n;
        let mut spins = vec![1i8; self.n];
        let mut out = vec![0.0; dim];
        let mut e = self.energy_of(&spins);
        out[0] = e;
        // Gray-code walk: one flip per step.
        let mut prev_gray = 0usize;
        for k in 1..dim {
            let gray = k ^ (k >> 1);
            let bit = (gray ^ prev_gray).trailing_zeros() as usize;
            e += self.flip_delta(bit, &spins);
            spins[bit] = -spins[bit];
            out[gray] = e;
            prev_gray = gray;
        }
        out
    }
}

/// A classical configuration; every entry is `+1` or `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(format!(
                "spin {pos} has value {}, expected ±1",
                spins[pos]
            )));
        }
        Ok(Self(spins))
    }

    pub fn all_up(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// Basis-state convention: bit `k` of `index` set means `σ_k = -1`.
    pub fn from_index(index: usize, n: usize) -> Self {
        Self((0..n).map(|k| if index >> k & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s == -1)
            .fold(0, |acc, (k, _)| acc | 1 << k)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }

    /// Global spin flip.
    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|&s| -s).collect())
    }
}

impl AsRef<[i8]> for SpinConfiguration {
    fn as_ref(&self) -> &[i8] {
        &self.0
    }
}

/// `E = -Σ_{i<j} J_ij σ_i σ_j - h Σ σ_i`.
pub fn classical_energy(instance: &IsingInstance, config: &SpinConfiguration) -> Result<f64> {
    if config.len() != instance.n_spins() {
        return Err(Error::SizeMismatch { expected: instance.n_spins(), got: config.len() });
    }
    Ok(instance.energy_of(config.spins()))
}
