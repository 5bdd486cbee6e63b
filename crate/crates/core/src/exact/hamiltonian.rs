use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_exact_size, QuantumState};
use crate::error::{Error, Result};
use crate::ising::IsingInstance;

/// An instance prepared for state-vector work: the classical energy of
/// every basis state, computed once.
#[derive(Debug, Clone)]
pub struct ExactSystem {
    n: usize,
    diag: Vec<f64>,
}

impl ExactSystem {
    pub fn new(instance: &IsingInstance) -> Result<Self> {
        check_exact_size(instance.n_spins())?;
        Ok(Self { n: instance.n_spins(), diag: instance.diagonal_energies() })
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `out = (H(Γ) - shift) ψ` with `H = H_0 - Γ Σ σ^x`.
    pub fn apply_shifted(&self, gamma: f64, shift: f64, psi: &[Complex64], out: &mut [Complex64]) {
        for (idx, o) in out.iter_mut().enumerate() {
            let mut flips = Complex64::new(0.0, 0.0);
            for k in 0..self.n {
                flips += psi[idx ^ (1 << k)];
            }
            *o = psi[idx] * (self.diag[idx] - shift) - flips * gamma;
        }
    }

    /// Real-vector version of [`apply_shifted`](Self::apply_shifted).
    pub fn apply_real(&self, gamma: f64, shift: f64, psi: &[f64], out: &mut [f64]) {
        for (idx, o) in out.iter_mut().enumerate() {
            let mut flips = 0.0;
            for k in 0..self.n {
                flips += psi[idx ^ (1 << k)];
            }
            *o = psi[idx] * (self.diag[idx] - shift) - flips * gamma;
        }
    }

    /// `⟨ψ|H(Γ)|ψ⟩` for a normalised state.
    pub fn energy(&self, gamma: f64, psi: &[Complex64]) -> f64 {
        let mut h = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_shifted(gamma, 0.0, psi, &mut h);
        psi.iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Upper bound on the spectral radius of `H(Γ) - shift`.
    pub fn spectral_bound(&self, gamma: f64, shift: f64) -> f64 {
        let (lo, hi) = self.diag.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &e| (l.min(e), h.max(e)));
        (hi - shift).abs().max((lo - shift).abs()) + self.n as f64 * gamma.abs()
    }
}

/// `H|ψ⟩` for `H = H_0 - Γ Σ σ^x`, without normalisation.
pub fn apply_hamiltonian(instance: &IsingInstance, gamma: f64, state: &QuantumState) -> Result<QuantumState> {
    if state.n_spins() != instance.n_spins() {
        return Err(Error::SizeMismatch { expected: 1 << instance.n_spins(), got: state.dim() });
    }
    let sys = ExactSystem::new(instance)?;
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    sys.apply_shifted(gamma, 0.0, state.amplitudes(), &mut out);
    QuantumState::from_amplitudes(out)
}

/// The full `2^N × 2^N` Hamiltonian. Only sensible for small `N`; used by
/// the dense eigen-solver and as a test oracle.
pub fn dense_hamiltonian(sys: &ExactSystem, gamma: f64) -> DMatrix<f64> {
    let dim = sys.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = sys.diag[i];
        for k in 0..sys.n {
            m[(i, i ^ (1 << k))] = -gamma;
        }
    }
    m
}
