use serde::{Deserialize, Serialize};

use super::{check_exact_size, stationary_ground_state, OverlapTrajectory, ProbabilityVector, TrajectoryLabel};
use crate::error::{Error, Result};
use crate::ising::{enumerate_ground_states, IsingInstance};
use crate::schedule::Schedule;

/// Equilibrium distribution `e^{-E_i/T} / Z`.
pub fn boltzmann_distribution(instance: &IsingInstance, t: f64) -> Result<ProbabilityVector> {
    check_exact_size(instance.n_spins())?;
    Ok(ProbabilityVector { probs: boltzmann_weights(&instance.diagonal_energies(), t)? })
}

fn boltzmann_weights(diag: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("temperature must be positive, got {t}")));
    }
    let e_min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = diag.iter().map(|e| (-(e - e_min) / t).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= z);
    Ok(w)
}

/// `P_SA^st(T)`: equilibrium weight of the certified ground configurations.
pub fn boltzmann_ground_probability(instance: &IsingInstance, t: f64) -> Result<f64> {
    let cert = enumerate_ground_states(instance)?;
    Ok(boltzmann_distribution(instance, t)?.ground_probability(&cert))
}

/// Which ensemble a correlation function is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    /// Thermal average at temperature `T`.
    ThermalT,
    /// Expectation in the lowest stationary state at transverse field `Γ`.
    QuantumGamma,
}

/// `⟨σ_i^z σ_j^z⟩` in the chosen ensemble at control value `control`.
pub fn correlation_pair(instance: &IsingInstance, control: f64, i: usize, j: usize, kind: CorrelationKind) -> Result<f64> {
    let n = instance.n_spins();
    if i >= n || j >= n {
        return Err(Error::InvalidParameter(format!("spin index out of range: ({i}, {j}) for {n} spins")));
    }
    if i == j {
        return Ok(1.0);
    }
    let weights = match kind {
        CorrelationKind::ThermalT => boltzmann_distribution(instance, control)?.probs,
        CorrelationKind::QuantumGamma => stationary_ground_state(instance, control)?.state.probabilities().probs,
    };
    let mask = (1usize << i) | (1usize << j);
    let total: f64 = weights.iter().sum();
    let c: f64 = weights
        .iter()
        .enumerate()
        .map(|(idx, w)| if (idx & mask).count_ones() == 1 { -w } else { *w })
        .sum();
    Ok((c / total).clamp(-1.0, 1.0))
}

/// `P_QA^st(Γ(t))` on a time grid.
pub fn stationary_qa_trajectory(instance: &IsingInstance, schedule: &Schedule, times: &[f64]) -> Result<OverlapTrajectory> {
    let cert = enumerate_ground_states(instance)?;
    let mut tr = OverlapTrajectory::new(TrajectoryLabel::P_QA_stationary);
    for &t in times {
        let g = schedule.value(t)?;
        tr.push(t, stationary_ground_state(instance, g)?.state.ground_probability(&cert));
    }
    Ok(tr)
}

/// `P_SA^st(T(t))` on a time grid.
pub fn stationary_sa_trajectory(instance: &IsingInstance, schedule: &Schedule, times: &[f64]) -> Result<OverlapTrajectory> {
    check_exact_size(instance.n_spins())?;
    let cert = enumerate_ground_states(instance)?;
    let diag = instance.diagonal_energies();
    let ground = cert.basis_indices();
    let mut tr = OverlapTrajectory::new(TrajectoryLabel::P_SA_stationary);
    for &t in times {
        let w = boltzmann_weights(&diag, schedule.value(t)?)?;
        tr.push(t, ground.iter().map(|&i| w[i]).sum());
    }
    Ok(tr)
}
