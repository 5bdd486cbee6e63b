use serde::{Deserialize, Serialize};

use super::{IsingInstance, SpinConfiguration};
use crate::error::{Error, Result};

/// Largest instance [`enumerate_ground_states`] will accept.
pub const MAX_ENUMERATION_SPINS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundMethod {
    /// All `2^N` configurations visited; the minimal set is complete.
    Exhaustive,
    /// Best energy found by repeated slow simulated annealing.
    LongSA,
}

/// Ground-state energy together with the configurations attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateCertificate {
    pub energy: f64,
    pub configurations: Vec<SpinConfiguration>,
    pub method: GroundMethod,
}

impl GroundStateCertificate {
    /// Whether `energy` equals the certified ground energy within a
    /// relative tolerance of `1e-9`.
    pub fn is_ground_energy(&self, energy: f64) -> bool {
        energy_tie(energy, self.energy)
    }

    /// Basis indices of the certified configurations.
    pub fn basis_indices(&self) -> Vec<usize> {
        self.configurations.iter().map(SpinConfiguration::to_index).collect()
    }

    pub fn degeneracy(&self) -> usize {
        self.configurations.len()
    }
}

pub(crate) fn energy_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + b.abs())
}

/// Visit all `2^N` configurations and collect every minimiser.
pub fn enumerate_ground_states(instance: &IsingInstance) -> Result<GroundStateCertificate> {
    let n = instance.n_spins();
    if n > MAX_ENUMERATION_SPINS {
        return Err(Error::SizeLimit { what: "exhaustive enumeration", limit: MAX_ENUMERATION_SPINS, got: n });
    }
    let diag = instance.diagonal_energies();
    Ok(certificate_from_diagonal(&diag, n))
}

pub(crate) fn certificate_from_diagonal(diag: &[f64], n: usize) -> GroundStateCertificate {
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let configurations = diag
        .iter()
        .enumerate()
        .filter(|&(_, &e)| energy_tie(e, min))
        .map(|(idx, _)| SpinConfiguration::from_index(idx, n))
        .collect();
    GroundStateCertificate { energy: min, configurations, method: GroundMethod::Exhaustive }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{make_ferromagnet, Topology};

    #[test]
    fn two_spin_ferromagnet() {
        let inst = IsingInstance::from_pairs(2, [(0, 1, 1.0)], 0.1, Topology::Complete).unwrap();
        let cert = enumerate_ground_states(&inst).unwrap();
        assert_eq!(cert.configurations, vec![SpinConfiguration::all_up(2)]);
        assert!((cert.energy + 1.2).abs() < 1e-15);

        let free = inst.with_field(0.0);
        let cert = enumerate_ground_states(&free).unwrap();
        assert_eq!(cert.degeneracy(), 2);
        assert!(cert.configurations.contains(&SpinConfiguration::new(vec![-1, -1]).unwrap()));
    }

    #[test]
    fn three_spin_ferromagnet_by_hand() {
        let inst = make_ferromagnet(3, 1.0).unwrap();
        // Independent enumeration of the eight configurations.
        let mut best = (f64::INFINITY, Vec::new());
        for idx in 0..8usize {
            let s: Vec<f64> = (0..3).map(|k| if idx >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let e = -(s[0] * s[1] + s[0] * s[2] + s[1] * s[2]) - 0.1 * (s[0] + s[1] + s[2]);
            if e < best.0 - 1e-12 {
                best = (e, vec![idx]);
            } else if (e - best.0).abs() < 1e-12 {
                best.1.push(idx);
            }
        }
        let cert = enumerate_ground_states(&inst).unwrap();
        assert_eq!(best.1, vec![0]);
        assert_eq!(cert.basis_indices(), best.1);
        assert!((cert.energy - (-3.3)).abs() < 1e-12);
    }

    #[test]
    fn refuses_oversize() {
        let inst = make_ferromagnet(25, 1.0).unwrap();
        let err = enumerate_ground_states(&inst).unwrap_err();
        assert!(err.to_string().contains("24"), "{err}");
    }
}
