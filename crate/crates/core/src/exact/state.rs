use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ising::GroundStateCertificate;

/// Complex amplitudes over the `2^n` z-basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Equal-amplitude superposition: the ground state for `Γ → ∞`.
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).recip().sqrt(), 0.0);
        Self { n, amplitudes: vec![a; dim] }
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n, amplitudes }
    }

    /// Wrap raw amplitudes; the length must be a power of two. The vector is
    /// not renormalised.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("state length {dim} is not a power of two")));
        }
        Ok(Self { n: dim.trailing_zeros() as usize, amplitudes })
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt().recip();
        self.amplitudes.iter_mut().for_each(|a| *a *= s);
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Total probability on the certified ground configurations.
    pub fn ground_probability(&self, cert: &GroundStateCertificate) -> f64 {
        cert.basis_indices().iter().map(|&i| self.amplitudes[i].norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> ProbabilityVector {
        ProbabilityVector { probs: self.amplitudes.iter().map(Complex64::norm_sqr).collect() }
    }
}

/// A distribution over the `2^n` classical configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    pub probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        Self { probs: vec![1.0 / dim as f64; dim] }
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn ground_probability(&self, cert: &GroundStateCertificate) -> f64 {
        cert.basis_indices().iter().map(|&i| self.probs[i]).sum()
    }

    /// Entries non-negative (to `-tol`) and summing to one within `tol`.
    pub fn is_simplex(&self, tol: f64) -> bool {
        self.probs.iter().all(|&p| p >= -tol) && (self.total() - 1.0).abs() <= tol
    }
}
