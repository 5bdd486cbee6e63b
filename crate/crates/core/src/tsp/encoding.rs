use super::instance::check_permutation;
use super::{Tour, TspInstance};
use crate::error::{Error, Result};

/// Binary units `n_ia = 1` iff city `i` is visited at stop `a`.
///
/// The spin image is `σ_ia = 2 n_ia - 1`. A valid matrix has exactly one
/// unit per row (each city visited once) and per column (one city per stop).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitMatrix {
    n: usize,
    units: Vec<u8>,
}

impl UnitMatrix {
    /// Encode a visiting order (`order[a]` is the city at stop `a`).
    pub fn from_order(order: &[usize]) -> Result<Self> {
        check_permutation(order)?;
        let n = order.len();
        let mut units = vec![0u8; n * n];
        for (a, &i) in order.iter().enumerate() {
            units[i * n + a] = 1;
        }
        Ok(Self { n, units })
    }

    /// From raw row-major units, unchecked until [`UnitMatrix::to_order`].
    pub fn from_units(n: usize, units: Vec<u8>) -> Result<Self> {
        if units.len() != n * n {
            return Err(Error::SizeMismatch { expected: n * n, got: units.len() });
        }
        Ok(Self { n, units })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n_ia`.
    pub fn unit(&self, city: usize, stop: usize) -> u8 {
        self.units[city * self.n + stop]
    }

    pub fn spins(&self) -> Vec<i8> {
        self.units.iter().map(|&u| 2 * u as i8 - 1).collect()
    }

    /// Decode, rejecting anything that is not a permutation matrix.
    pub fn to_order(&self) -> Result<Vec<usize>> {
        let n = self.n;
        if self.units.iter().any(|&u| u > 1) {
            return Err(Error::InvalidParameter("units must be 0 or 1".into()));
        }
        for i in 0..n {
            let row: u32 = (0..n).map(|a| u32::from(self.unit(i, a))).sum();
            let col: u32 = (0..n).map(|a| u32::from(self.unit(a, i))).sum();
            if row != 1 || col != 1 {
                return Err(Error::InvalidParameter(format!(
                    "unit matrix violates the one-per-row/column constraint at index {i}"
                )));
            }
        }
        Ok((0..n).map(|a| (0..n).find(|&i| self.unit(i, a) == 1).expect("column has one unit")).collect())
    }

    /// `L = ½ Σ_{i,j,a} d_ij n_ia (n_{j,a+1} + n_{j,a-1})`, stops cyclic.
    pub fn length(&self, instance: &TspInstance) -> Result<f64> {
        let n = self.n;
        if instance.n_cities() != n {
            return Err(Error::SizeMismatch { expected: instance.n_cities(), got: n });
        }
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    let next = self.unit(j, (a + 1) % n);
                    let prev = self.unit(j, (a + n - 1) % n);
                    total += instance.distance(i, j) * f64::from(self.unit(i, a)) * f64::from(next + prev);
                }
            }
        }
        Ok(0.5 * total)
    }
}

/// Encode to units and decode back.
pub fn tour_spin_roundtrip(tour: &Tour) -> Result<Tour> {
    Tour::new(UnitMatrix::from_order(tour.order())?.to_order()?)
}
