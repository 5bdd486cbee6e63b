use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use super::{IsingInstance, Topology};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Longitudinal field used by every generator unless overridden with
/// [`IsingInstance::with_field`]; it lifts the global up-down degeneracy.
pub const DEFAULT_FIELD: f64 = 0.1;

/// Uniform ferromagnet on the complete graph: `J_ij = j` for every pair.
pub fn make_ferromagnet(n: usize, j: f64) -> Result<IsingInstance> {
    if n == 0 {
        return Err(Error::InvalidParameter("ferromagnet needs n >= 1".into()));
    }
    if !(j > 0.0) {
        return Err(Error::InvalidParameter(format!("ferromagnetic coupling must be positive, got {j}")));
    }
    let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b, j)));
    IsingInstance::from_pairs(n, pairs, DEFAULT_FIELD, Topology::Complete)
}

/// The eight-spin frustrated cluster.
///
/// Spins are labelled 1..8 in the comments (0..7 in code). Spins 3 and 6
/// are joined directly by an antiferromagnetic bond and indirectly by two
/// ferromagnetic paths, 3-4-6 and 3-5-6. Chains 1-2-3 and 6-7-8 hang off
/// the ends. All bonds have unit magnitude.
pub fn make_frustrated8() -> IsingInstance {
    const FERRO: [(usize, usize); 8] = [(1, 2), (2, 3), (6, 7), (7, 8), (3, 4), (4, 6), (3, 5), (5, 6)];
    let pairs = FERRO
        .iter()
        .map(|&(a, b)| (a - 1, b - 1, 1.0))
        .chain(std::iter::once((2, 5, -1.0)));
    IsingInstance::from_pairs(8, pairs, DEFAULT_FIELD, Topology::Custom)
        .expect("static bond list is valid")
}

/// Sherrington-Kirkpatrick instance: every pair drawn from `N(0, 1/n)`.
pub fn make_sk(n: usize, seed: u64) -> Result<IsingInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter("SK model needs n >= 2".into()));
    }
    let mut rng = Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, (1.0 / n as f64).sqrt()).expect("finite variance");
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((a, b, normal.sample(&mut rng)));
        }
    }
    IsingInstance::from_pairs(n, pairs, DEFAULT_FIELD, Topology::Complete)
}

/// Two-dimensional Edwards-Anderson spin glass with `N(0, 1)` bonds between
/// nearest neighbours of a `side × side` square lattice. Site `(x, y)` has
/// index `y * side + x`.
///
/// With `side == 2` and periodic wrapping the two bonds joining a pair of
/// sites coincide; their couplings are summed into one stored bond.
pub fn make_ea2d(side: usize, periodic: bool, seed: u64) -> Result<IsingInstance> {
    if side < 2 {
        return Err(Error::InvalidParameter("EA lattice needs side >= 2".into()));
    }
    let mut rng = Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit variance");
    let idx = |x: usize, y: usize| y * side + x;
    let mut bonds: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
    for y in 0..side {
        for x in 0..side {
            let here = idx(x, y);
            let right = if x + 1 < side { Some(idx(x + 1, y)) } else if periodic { Some(idx(0, y)) } else { None };
            let down = if y + 1 < side { Some(idx(x, y + 1)) } else if periodic { Some(idx(x, 0)) } else { None };
            for there in [right, down].into_iter().flatten() {
                let j = normal.sample(&mut rng);
                *bonds.entry((here.min(there), here.max(there))).or_insert(0.0) += j;
            }
        }
    }
    IsingInstance::from_pairs(
        side * side,
        bonds.into_iter().map(|((a, b), j)| (a, b, j)),
        DEFAULT_FIELD,
        Topology::Square2D { side, periodic },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ferromagnet_shapes() {
        let two = make_ferromagnet(2, 1.0).unwrap();
        assert_eq!(two.pairs(), vec![(0, 1, 1.0)]);
        let eight = make_ferromagnet(8, 1.0).unwrap();
        assert_eq!(eight.bond_count(), 28);
        assert_eq!(eight.field(), 0.1);
        assert!(make_ferromagnet(0, 1.0).is_err());
        assert!(make_ferromagnet(3, -1.0).is_err());
    }

    #[test]
    fn frustrated_plaquette_sign() {
        let f = make_frustrated8();
        // 3-4, 4-6, 6-3 in 1-based labels.
        let product = f.coupling(2, 3) * f.coupling(3, 5) * f.coupling(5, 2);
        assert_eq!(product, -1.0);
        assert_eq!(f.bond_count(), 9);
        assert!(f.pairs().iter().all(|&(_, _, j)| j.abs() == 1.0));
    }

    #[test]
    fn sk_is_reproducible() {
        let a = make_sk(8, 42).unwrap();
        let b = make_sk(8, 42).unwrap();
        let c = make_sk(8, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(make_sk(1, 0).is_err());
    }

    #[test]
    fn sk_moments() {
        let n = 1000;
        let inst = make_sk(n, 2024).unwrap();
        let js: Vec<f64> = inst.pairs().iter().map(|p| p.2).collect();
        let pairs = js.len() as f64;
        let mean = js.iter().sum::<f64>() / pairs;
        let var = js.iter().map(|j| (j - mean).powi(2)).sum::<f64>() / (pairs - 1.0);
        let sd = (1.0 / n as f64).sqrt();
        assert!(mean.abs() <= 3.0 * sd / pairs.sqrt(), "mean {mean}");
        assert!((var * n as f64 - 1.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn ea_lattice_sizes() {
        assert_eq!(make_ea2d(25, true, 1).unwrap().n_spins(), 625);
        assert_eq!(make_ea2d(100, true, 1).unwrap().n_spins(), 10_000);
        assert_eq!(make_ea2d(3, true, 1).unwrap().bond_count(), 18);
        assert_eq!(make_ea2d(3, false, 1).unwrap().bond_count(), 12);
        assert!(make_ea2d(1, true, 1).is_err());
    }

    #[test]
    fn ea_bonds_are_nearest_neighbour() {
        let side = 5;
        let inst = make_ea2d(side, true, 9).unwrap();
        for (a, b, _) in inst.pairs() {
            let (ax, ay) = (a % side, a / side);
            let (bx, by) = (b % side, b / side);
            let dx = ax.abs_diff(bx).min(side - ax.abs_diff(bx));
            let dy = ay.abs_diff(by).min(side - ay.abs_diff(by));
            assert_eq!(dx + dy, 1, "bond {a}-{b}");
        }
        for i in 0..inst.n_spins() {
            assert_eq!(inst.degree(i), 4);
        }
    }
}
