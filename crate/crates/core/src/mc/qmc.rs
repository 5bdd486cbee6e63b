use rand::Rng as _;
use rayon::prelude::*;

use super::record::{McMethod, RunRecord};
use super::{heat_bath_probability, random_spins, McPlan, ReplicaStats};
use crate::error::{Error, Result};
use crate::ising::IsingInstance;
use crate::rng::{self, Rng};
use crate::schedule::Schedule;

/// Inter-slice coupling `Γ_M = γ_M / β_eff` with `γ_M = ½ ln coth(βΓ/M)`.
///
/// Since `β = M·β_eff`, the argument `βΓ/M` is `β_eff·Γ` and the result
/// does not depend on `m` once `β_eff` is fixed; `m` is validated only.
///
/// ```
/// let g = qanneal::mc::trotter_coupling(0.0316228, 1.0, 100).unwrap();
/// assert!((g - 1.73).abs() < 0.01);
/// ```
pub fn trotter_coupling(gamma: f64, beta_eff: f64, m: usize) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!(
            "transverse field must be positive for a finite Trotter coupling, got {gamma}"
        )));
    }
    if !(beta_eff > 0.0 && beta_eff.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta_eff must be positive, got {beta_eff}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("Trotter number must be at least 1".into()));
    }
    let x = beta_eff * gamma;
    // ln coth x = ln(1 + e^{-2x}) - ln(1 - e^{-2x}), stable at both ends.
    let q = (-2.0 * x).exp();
    let ln_one_minus_q = if q < 0.5 { (-q).ln_1p() } else { (-(-2.0 * x).exp_m1()).ln() };
    let ln_coth = q.ln_1p() - ln_one_minus_q;
    Ok(0.5 * ln_coth / beta_eff)
}

/// `M` classical copies of an instance coupled ferromagnetically along a
/// periodic Trotter direction.
///
/// Sampling weight: `exp(-β_eff Σ_k E(σ_k) + β_eff Γ_M Σ_k Σ_i σ_ik σ_i,k+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterLattice {
    n: usize,
    m: usize,
    beta_eff: f64,
    gamma: f64,
    gamma_m: f64,
    spins: Vec<i8>,
}

impl TrotterLattice {
    /// Build from slice-major spins (`spins[k·N + i]` is spin `i` of slice `k`).
    pub fn from_spins(n: usize, m: usize, beta_eff: f64, gamma: f64, spins: Vec<i8>) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("Trotter number must be at least 2, got {m}")));
        }
        if spins.len() != n * m {
            return Err(Error::SizeMismatch { expected: n * m, got: spins.len() });
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter("spins must be +1 or -1".into()));
        }
        let gamma_m = trotter_coupling(gamma, beta_eff, m)?;
        Ok(Self { n, m, beta_eff, gamma, gamma_m, spins })
    }

    /// Independent uniformly random slices; slice `k` of run `run` draws
    /// from `rng::stream(seed, run, k + 1)`.
    pub fn random(n: usize, m: usize, beta_eff: f64, gamma: f64, seed: u64, run: u64) -> Result<Self> {
        let mut spins = Vec::with_capacity(n * m);
        for k in 0..m as u64 {
            spins.extend(random_spins(n, &mut rng::stream(seed, run, k + 1)));
        }
        Self::from_spins(n, m, beta_eff, gamma, spins)
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn m_trotter(&self) -> usize {
        self.m
    }

    pub fn beta_eff(&self) -> f64 {
        self.beta_eff
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Current `Γ_M`.
    pub fn coupling(&self) -> f64 {
        self.gamma_m
    }

    pub fn set_gamma(&mut self, gamma: f64) -> Result<()> {
        if gamma != self.gamma {
            self.gamma_m = trotter_coupling(gamma, self.beta_eff, self.m)?;
            self.gamma = gamma;
        }
        Ok(())
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn slice(&self, k: usize) -> &[i8] {
        &self.spins[k * self.n..(k + 1) * self.n]
    }

    pub fn slices(&self) -> impl Iterator<Item = &[i8]> {
        self.spins.chunks_exact(self.n)
    }

    /// Change of the dimensionless action when spin `i` of slice `k` flips.
    #[inline]
    pub fn action_delta(&self, instance: &IsingInstance, i: usize, k: usize) -> f64 {
        let n = self.n;
        let base = k * n;
        let prev = if k == 0 { self.m - 1 } else { k - 1 };
        let next = if k + 1 == self.m { 0 } else { k + 1 };
        let s = f64::from(self.spins[base + i]);
        let neighbours = f64::from(self.spins[prev * n + i]) + f64::from(self.spins[next * n + i]);
        self.beta_eff * (instance.flip_delta(i, &self.spins[base..base + n]) + 2.0 * self.gamma_m * s * neighbours)
    }

    /// Dimensionless action `β_eff (Σ_k E_k - Γ_M Σ_k Σ_i σ_ik σ_i,k+1)`.
    pub fn action(&self, instance: &IsingInstance) -> f64 {
        let classical: f64 = self.slices().map(|s| instance.energy_of(s)).sum();
        let mut bonds = 0.0;
        for k in 0..self.m {
            let next = (k + 1) % self.m;
            for i in 0..self.n {
                bonds += f64::from(self.spins[k * self.n + i] * self.spins[next * self.n + i]);
            }
        }
        self.beta_eff * (classical - self.gamma_m * bonds)
    }

    /// One Monte Carlo step: `N·M` heat-bath trials at random (site, slice).
    pub fn sweep(&mut self, instance: &IsingInstance, rng: &mut Rng) {
        let total = self.n * self.m;
        for _ in 0..total {
            let idx = rng.gen_range(0..total);
            let (k, i) = (idx / self.n, idx % self.n);
            let p = heat_bath_probability(self.action_delta(instance, i, k), 1.0);
            if rng.gen::<f64>() < p {
                self.spins[idx] = -self.spins[idx];
            }
        }
    }
}

/// A resumable quantum-annealing run: lattice, generator and step counter.
#[derive(Debug, Clone)]
pub struct QmcRun {
    pub(crate) lattice: TrotterLattice,
    pub(crate) rng: Rng,
    pub(crate) step: u64,
    pub(crate) run_seed: u64,
}

impl QmcRun {
    /// Random initial lattice for run index `run` of master seed `seed`,
    /// at `Γ = schedule(1)`.
    pub fn new(instance: &IsingInstance, schedule: &Schedule, beta_eff: f64, m: usize, seed: u64, run: u64) -> Result<Self> {
        let lattice = TrotterLattice::random(instance.n_spins(), m, beta_eff, schedule.value(1.0)?, seed, run)?;
        Ok(Self { lattice, rng: rng::stream(seed, run, 0), step: 0, run_seed: rng::sub_seed(seed, run, 0) })
    }

    pub fn lattice(&self) -> &TrotterLattice {
        &self.lattice
    }

    /// Monte Carlo steps completed so far.
    pub fn step(&self) -> u64 {
        self.step
    }

    /// Advance by one step with `Γ = schedule(step + 1)`.
    pub fn advance(&mut self, instance: &IsingInstance, schedule: &Schedule) -> Result<()> {
        let gamma = schedule.value((self.step + 1) as f64)?;
        self.lattice.set_gamma(gamma)?;
        self.lattice.sweep(instance, &mut self.rng);
        self.step += 1;
        Ok(())
    }

    /// Advance to `plan.mc_steps`, recording at the plan's steps that lie
    /// beyond the current one.
    pub fn run_to(&mut self, instance: &IsingInstance, schedule: &Schedule, plan: &McPlan) -> Result<RunRecord> {
        plan.validate()?;
        let stats = ReplicaStats::new(instance, plan.ground_energy);
        let mut record = RunRecord::new(self.run_seed, McMethod::Qa { m: self.lattice.m });
        let start = self.step;
        let mut pending = plan.record_at.iter().copied().filter(|&s| s >= start).peekable();
        if pending.peek() == Some(&self.step) {
            stats.record(&mut record, self.step, self.lattice.slices());
            pending.next();
        }
        while self.step < plan.mc_steps {
            self.advance(instance, schedule)?;
            if pending.peek() == Some(&self.step) {
                stats.record(&mut record, self.step, self.lattice.slices());
                pending.next();
            }
        }
        Ok(record)
    }
}

/// One quantum-annealing run (run index 0 of `seed`).
///
/// Each step sets `Γ = schedule(step)`, recomputes `Γ_M`, and performs
/// `N·M` trials. Recorded energies are per-slice classical energies.
pub fn run_qmc(
    instance: &IsingInstance,
    schedule: &Schedule,
    beta_eff: f64,
    m: usize,
    plan: &McPlan,
    seed: u64,
) -> Result<RunRecord> {
    QmcRun::new(instance, schedule, beta_eff, m, seed, 0)?.run_to(instance, schedule, plan)
}

/// `n_runs` independent quantum-annealing runs in parallel.
pub fn run_qmc_ensemble(
    instance: &IsingInstance,
    schedule: &Schedule,
    beta_eff: f64,
    m: usize,
    plan: &McPlan,
    n_runs: usize,
    seed: u64,
) -> Result<Vec<RunRecord>> {
    if n_runs == 0 {
        return Err(Error::InvalidParameter("n_runs must be at least 1".into()));
    }
    plan.validate()?;
    plan.schedule_values(schedule, "transverse field")?;
    (0..n_runs as u64)
        .into_par_iter()
        .map(|run| QmcRun::new(instance, schedule, beta_eff, m, seed, run)?.run_to(instance, schedule, plan))
        .collect()
}
