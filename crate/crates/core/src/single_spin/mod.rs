//! The single-spin problem `H = -hσ^z - Γ(t)σ^x`, solvable in closed form
//! for `Γ = -ct` (Landau-Zener), `c/t` and `c/√t`.
//!
//! Every closed form here is checked against [`solve_ode`], a direct
//! adaptive integration of the two amplitude equations.

mod closed_form;
mod ode;
mod report;
pub mod special;

pub use closed_form::{
    amplitude_b_inverse_sqrt, amplitude_b_inverse_time, amplitudes_inverse_sqrt, amplitudes_inverse_sqrt_tuned,
    amplitudes_inverse_time, asymptotic_b_inverse_sqrt, asymptotic_b_inverse_time,
    inverse_sqrt_exact_final_miss_probability, inverse_sqrt_final_miss_probability, inverse_time_final_miss_probability,
    inverse_time_miss_approx, lz_amplitude_b0, lz_exact_final_miss_probability, lz_final_miss_probability,
    tuned_initial_condition, AsymptoticEstimate, SingleSpinParams,
};
pub use ode::{solve_ode, solve_ode_from, AmplitudePair, OdeOptions, OdeSolution};
pub use report::{ode_final_miss, ode_final_miss_tuned, SingleSpinRow, SolvableSchedule};
