use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{check_exact_size, dense_hamiltonian, ExactSystem, QuantumState};
use crate::error::{Error, Result};
use crate::ising::{GroundStateCertificate, IsingInstance};

/// Up to this many spins the ground state comes from a dense symmetric
/// eigen-decomposition; above it, from restarted Lanczos on the
/// matrix-free operator.
pub const DENSE_EIGEN_LIMIT: usize = 10;

const RESIDUAL_TOL: f64 = 1e-8;

/// Lowest eigenpair of `H(Γ)`.
#[derive(Debug, Clone)]
pub struct GroundEigenpair {
    pub energy: f64,
    pub state: QuantumState,
    /// `‖Hψ - Eψ‖`.
    pub residual: f64,
}

/// Lowest-energy stationary state of `H_0 - Γ Σσ^x`, phase-fixed so the
/// largest-magnitude amplitude is real and positive.
pub fn stationary_ground_state(instance: &IsingInstance, gamma: f64) -> Result<GroundEigenpair> {
    check_exact_size(instance.n_spins())?;
    let sys = ExactSystem::new(instance)?;
    ground_eigenpair(&sys, gamma)
}

/// `P_QA^st(Γ) = Σ_g |⟨g|ψ_Γ⟩|²` over the certified ground configurations.
pub fn stationary_overlap(instance: &IsingInstance, gamma: f64, cert: &GroundStateCertificate) -> Result<f64> {
    Ok(stationary_ground_state(instance, gamma)?.state.ground_probability(cert))
}

pub(crate) fn ground_eigenpair(sys: &ExactSystem, gamma: f64) -> Result<GroundEigenpair> {
    let (mut energy, mut v) =
        if sys.n_spins() <= DENSE_EIGEN_LIMIT { dense_ground(sys, gamma) } else { lanczos_ground(sys, gamma, None)? };
    if residual(sys, gamma, energy, &v) > 0.1 * RESIDUAL_TOL {
        // The dense solver's accuracy is relative to ‖H‖; polish when Γ is large.
        (energy, v) = lanczos_ground(sys, gamma, Some(v))?;
    }
    fix_phase(&mut v);
    let residual = residual(sys, gamma, energy, &v);
    if residual > RESIDUAL_TOL {
        return Err(Error::EigenNonConvergence { iterations: 0, residual });
    }
    let state = QuantumState::from_amplitudes(v.into_iter().map(|x| Complex64::new(x, 0.0)).collect())?;
    Ok(GroundEigenpair { energy, state, residual })
}

fn dense_ground(sys: &ExactSystem, gamma: f64) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(dense_hamiltonian(sys, gamma));
    let (k, &e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    (e, eig.eigenvectors.column(k).iter().copied().collect())
}

fn residual(sys: &ExactSystem, gamma: f64, energy: f64, v: &[f64]) -> f64 {
    let mut hv = vec![0.0; v.len()];
    sys.apply_real(gamma, energy, v, &mut hv);
    hv.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn fix_phase(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let big = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
    let s = big.signum() / norm;
    v.iter_mut().for_each(|x| *x *= s);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Restarted Lanczos with full reorthogonalisation. Each cycle builds a
/// Krylov basis from the current Ritz vector; cycles repeat until the
/// residual drops below tolerance.
fn lanczos_ground(sys: &ExactSystem, gamma: f64, start: Option<Vec<f64>>) -> Result<(f64, Vec<f64>)> {
    const KRYLOV: usize = 80;
    const MAX_CYCLES: usize = 200;
    let dim = sys.dim();
    let m = KRYLOV.min(dim);
    // Start from a deterministic vector with overlap on every basis state.
    let mut x: Vec<f64> =
        start.unwrap_or_else(|| (0..dim).map(|i| 1.0 + 0.1 * ((i as f64) * 0.618_033_988_7).fract()).collect());
    let nx = dot(&x, &x).sqrt();
    x.iter_mut().for_each(|a| *a /= nx);
    let mut last_res = f64::INFINITY;
    let mut energy = 0.0;
    for cycle in 0..MAX_CYCLES {
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut w = vec![0.0; dim];
        for j in 0..m {
            sys.apply_real(gamma, 0.0, &basis[j], &mut w);
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            for _ in 0..2 {
                for q in &basis {
                    let p = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= p * qi);
                }
            }
            let b = dot(&w, &w).sqrt();
            if j + 1 == m || b < 1e-12 {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, &e) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
        energy = e;
        let coeffs = eig.eigenvectors.column(idx);
        let mut ritz = vec![0.0; dim];
        for (q, &cf) in basis.iter().zip(coeffs.iter()) {
            ritz.iter_mut().zip(q).for_each(|(r, qi)| *r += cf * qi);
        }
        let nr = dot(&ritz, &ritz).sqrt();
        ritz.iter_mut().for_each(|r| *r /= nr);
        x = ritz;
        last_res = residual(sys, gamma, energy, &x);
        if last_res <= 0.1 * RESIDUAL_TOL {
            log::debug!("lanczos converged after {} cycles", cycle + 1);
            return Ok((energy, x));
        }
    }
    if last_res <= RESIDUAL_TOL {
        return Ok((energy, x));
    }
    Err(Error::EigenNonConvergence { iterations: MAX_CYCLES, residual: last_res })
}
