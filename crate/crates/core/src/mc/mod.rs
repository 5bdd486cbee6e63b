//! Monte Carlo annealing for instances too large for exact dynamics.
//!
//! * [`run_sa`]: classical annealing with heat-bath single-spin flips.
//! * [`run_qmc`]: quantum annealing on the Suzuki-Trotter image, an
//!   `M`-slice classical lattice at inverse temperature `β_eff` per slice
//!   with inter-slice coupling [`trotter_coupling`].
//! * [`run_pimc`]: ground-state path-integral sampling on a static
//!   lattice whose couplings follow the annealing schedule along
//!   imaginary time.
//! * [`zero_t_quench`] and [`quench_vs_anneal_report`].
//!
//! One Monte Carlo step is `N` trials for a classical replica and `N·M`
//! trials for a Trotter lattice; [`RunRecord`] stores both the raw step
//! and the cost-rescaled time `t' = M·t`.
//!
//! Time is measured in Monte Carlo steps. Classical annealing evaluates
//! `T` at each trial's fractional time; the Trotter lattice takes
//! `Γ = schedule(s)` for the whole of step `s`. The `t_start` of a
//! [`Schedule`](crate::schedule::Schedule) is not used here, and since a
//! run stops at a finite step the control never reaches zero.

mod checkpoint;
mod pimc;
mod qmc;
mod quench;
mod record;
mod sa;

use rand::Rng as _;

pub use checkpoint::{Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use pimc::{pimc_bond_gammas, run_pimc, PimcParams};
pub use qmc::{run_qmc, run_qmc_ensemble, trotter_coupling, QmcRun, TrotterLattice};
pub use quench::{quench_vs_anneal_report, zero_t_quench, QuenchOptions, QuenchProcess, QuenchReport, QuenchRow};
pub use record::{log_record_steps, merge_records, McMethod, RunRecord, StepSample, RUN_RECORD_CSV_HEADER};
pub use sa::{long_sa_ground, run_sa, run_sa_outcomes, SaOutcome};

use crate::error::{Error, Result};
use crate::ising::{energy_tie, IsingInstance};
use crate::rng::Rng;
use crate::schedule::Schedule;

/// Length of a run, the steps at which observables are recorded, and the
/// reference energy used to count ground-state hits.
#[derive(Debug, Clone, PartialEq)]
pub struct McPlan {
    pub mc_steps: u64,
    /// Strictly increasing steps in `0..=mc_steps`; step 0 records the
    /// random initial state.
    pub record_at: Vec<u64>,
    /// Without a reference energy every `ground_hits` is zero.
    pub ground_energy: Option<f64>,
}

impl McPlan {
    /// Ten log-spaced records per decade, no ground reference.
    pub fn new(mc_steps: u64) -> Self {
        Self { mc_steps, record_at: log_record_steps(mc_steps, 10), ground_energy: None }
    }

    pub fn with_record_at(mut self, steps: Vec<u64>) -> Self {
        self.record_at = steps;
        self
    }

    pub fn with_ground(mut self, energy: f64) -> Self {
        self.ground_energy = Some(energy);
        self
    }

    pub fn validate(&self) -> Result<()> {
        record::check_record_steps(&self.record_at, self.mc_steps)
    }

    /// `schedule(s)` for `s = 1..=mc_steps`; every value must be finite and positive.
    pub(crate) fn schedule_values(&self, schedule: &Schedule, what: &str) -> Result<Vec<f64>> {
        let values = (1..=self.mc_steps)
            .map(|s| schedule.value(s as f64))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!("{what} must stay positive during the run, got {bad}")));
        }
        Ok(values)
    }
}

/// Heat-bath acceptance `1 / (1 + e^{Δ/T})`.
#[inline]
pub fn heat_bath_probability(delta: f64, temperature: f64) -> f64 {
    1.0 / (1.0 + (delta / temperature).exp())
}

pub(crate) fn random_spins(n: usize, rng: &mut Rng) -> Vec<i8> {
    (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

/// Observables of a set of replicas at one step.
pub(crate) struct ReplicaStats<'a> {
    instance: &'a IsingInstance,
    ground: Option<f64>,
}

impl<'a> ReplicaStats<'a> {
    pub(crate) fn new(instance: &'a IsingInstance, ground: Option<f64>) -> Self {
        Self { instance, ground }
    }

    pub(crate) fn record<'s>(&self, record: &mut RunRecord, step: u64, replicas: impl IntoIterator<Item = &'s [i8]>) {
        let n = self.instance.n_spins() as f64;
        let mut energies = Vec::new();
        let mut hits = 0;
        let mut mag = 0.0;
        for spins in replicas {
            let e = self.instance.energy_of(spins);
            if self.ground.is_some_and(|g| energy_tie(e, g)) {
                hits += 1;
            }
            mag += spins.iter().map(|&s| f64::from(s)).sum::<f64>() / n;
            energies.push(e);
        }
        let count = energies.len().max(1) as f64;
        record.push(step, &energies, hits, mag / count);
    }
}
