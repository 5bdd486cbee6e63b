//! Ising instances, spin configurations and brute-force ground states.
//!
//! The classical cost function is
//!
//! ```text
//! E(σ) = -Σ_{i<j} J_ij σ_i σ_j - h Σ_i σ_i
//! ```
//!
//! with every pair counted once. Instances are immutable once built.

mod generators;
mod ground;
mod instance;
mod io;

pub use generators::{make_ea2d, make_ferromagnet, make_frustrated8, make_sk, DEFAULT_FIELD};
pub(crate) use ground::energy_tie;
pub use ground::{enumerate_ground_states, GroundMethod, GroundStateCertificate, MAX_ENUMERATION_SPINS};
pub use instance::{classical_energy, IsingInstance, SpinConfiguration, Topology};
pub use io::{read_instance, write_instance};
