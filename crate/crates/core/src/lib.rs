//! Quantum annealing and simulated annealing on identical optimisation
//! problems.
//!
//! * [`ising`]: instances, generators and brute-force ground states.
//! * [`schedule`]: the control parameter `Γ(t)` / `T(t)`.
//! * [`exact`]: state-vector Schrödinger evolution (real and imaginary
//!   time), the classical master equation and stationary references.
//! * [`single_spin`]: closed-form two-level solutions and their ODE oracle.
//! * [`mc`]: simulated annealing, Suzuki-Trotter quantum Monte Carlo and
//!   path-integral Monte Carlo.
//! * [`tsp`]: traveling-salesman instances and annealers.
//! * [`analysis`] and [`experiment`]: fits, comparisons and the
//!   reproducible experiment runner behind the `qanneal` binary.
//!
//! The guide in `book/` walks through each of these with runnable code.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod mc;
pub mod ising;
pub mod rng;
pub mod schedule;
pub mod single_spin;
pub mod tsp;

pub use error::{Error, Result};
pub use ising::{IsingInstance, SpinConfiguration};
pub use schedule::Schedule;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/ising.md")]
    mod ising {}
    #[doc = include_str!("../../../book/src/schedules.md")]
    mod schedules {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/single-spin.md")]
    mod single_spin {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/tsp.md")]
    mod tsp {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
