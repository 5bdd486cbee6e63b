//! Exact small-system dynamics over the full `2^N` z-basis.
//!
//! Basis index bit `k` set means `σ_k = -1` (see
//! [`SpinConfiguration::from_index`](crate::ising::SpinConfiguration::from_index)).
//! All operators are applied matrix-free: the diagonal is the classical
//! energy table and the transverse term couples states at Hamming distance 1.

mod eigen;
mod evolve;
mod hamiltonian;
mod master;
mod state;
mod stationary;
mod trajectory;

pub use eigen::{stationary_ground_state, stationary_overlap, GroundEigenpair, DENSE_EIGEN_LIMIT};
pub use evolve::{evolve_imaginary_time, evolve_schrodinger, EvolveOptions};
pub use hamiltonian::{apply_hamiltonian, dense_hamiltonian, ExactSystem};
pub use master::{build_transition_matrix, heat_bath_rate, master_evolve, MasterOptions, TransitionGenerator};
pub use state::{ProbabilityVector, QuantumState};
pub use stationary::{
    boltzmann_distribution, boltzmann_ground_probability, correlation_pair, stationary_qa_trajectory,
    stationary_sa_trajectory, CorrelationKind,
};
pub use trajectory::{log_spaced, OverlapTrajectory, TrajectoryLabel};

/// Largest system the exact solvers accept (a 14-spin state vector is
/// 16384 complex amplitudes; the dense alternatives blow up long before).
pub const MAX_EXACT_SPINS: usize = 14;

pub(crate) fn check_exact_size(n: usize) -> crate::Result<()> {
    if n > MAX_EXACT_SPINS {
        Err(crate::Error::SizeLimit { what: "exact dynamics", limit: MAX_EXACT_SPINS, got: n })
    } else {
        Ok(())
    }
}
