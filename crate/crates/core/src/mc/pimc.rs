use rand::Rng as _;

use super::record::{McMethod, RunRecord};
use super::{heat_bath_probability, random_spins, trotter_coupling, ReplicaStats};
use crate::error::{Error, Result};
use crate::ising::IsingInstance;
use crate::rng;
use crate::schedule::Schedule;

/// Lattice size and sampling lengths for [`run_pimc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PimcParams {
    /// Total imaginary time `β`.
    pub beta: f64,
    /// Number of slices; even.
    pub m: usize,
    pub equil_steps: u64,
    pub measure_steps: u64,
}

/// `Γ` on each of the `M - 1` bonds of an open path.
///
/// Bond `k` (`1 ≤ k ≤ M-1`, joining slices `k` and `k+1`) sits at
/// imaginary time `τ_k = β·min(k, M-k)/M`, so the field is weakest, and
/// the slice locking strongest, at the center of the path.
pub fn pimc_bond_gammas(schedule: &Schedule, beta: f64, m: usize) -> Result<Vec<f64>> {
    if m < 2 || m % 2 != 0 {
        return Err(Error::InvalidParameter(format!("PIMC needs an even number of slices, got {m}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    (1..m)
        .map(|k| schedule.value(beta * k.min(m - k) as f64 / m as f64))
        .collect()
}

/// Path-integral sampling of the state reached after imaginary time `β/2`.
///
/// The `M` slices carry `β_eff = β/M`. Bond couplings follow
/// [`pimc_bond_gammas`]; the end slices are free, which projects onto the
/// uniform superposition at the path ends. After `equil_steps` steps of
/// `N·M` heat-bath trials, slice `M/2` is measured after each of
/// `measure_steps` further steps. The returned record has one sample at
/// `equil_steps + measure_steps` whose `n_replicas` is `measure_steps`.
pub fn run_pimc(
    instance: &IsingInstance,
    schedule: &Schedule,
    params: &PimcParams,
    ground_energy: Option<f64>,
    seed: u64,
) -> Result<RunRecord> {
    let PimcParams { beta, m, equil_steps, measure_steps } = *params;
    let gammas = pimc_bond_gammas(schedule, beta, m)?;
    if measure_steps == 0 {
        return Err(Error::InvalidParameter("measure_steps must be at least 1".into()));
    }
    let beta_eff = beta / m as f64;
    let bonds: Vec<f64> = gammas
        .iter()
        .map(|&g| trotter_coupling(g, beta_eff, m).map(|c| beta_eff * c))
        .collect::<Result<_>>()?;
    let n = instance.n_spins();
    let mut spins = Vec::with_capacity(n * m);
    for k in 0..m as u64 {
        spins.extend(random_spins(n, &mut rng::stream(seed, 0, k + 1)));
    }
    let mut rng = rng::stream(seed, 0, 0);
    let total = n * m;
    let center = m / 2;
    let mut energies = Vec::with_capacity(measure_steps as usize);
    let mut hits = 0;
    let mut mag = 0.0;
    let stats = ReplicaStats::new(instance, ground_energy);
    let mut scratch = RunRecord::new(0, McMethod::Sa);
    for step in 0..equil_steps + measure_steps {
        for _ in 0..total {
            let idx = rng.gen_range(0..total);
            let (k, i) = (idx / n, idx % n);
            let s = f64::from(spins[idx]);
            let mut trotter = 0.0;
            if k > 0 {
                trotter += bonds[k - 1] * f64::from(spins[idx - n]);
            }
            if k + 1 < m {
                trotter += bonds[k] * f64::from(spins[idx + n]);
            }
            let delta = beta_eff * instance.flip_delta(i, &spins[k * n..(k + 1) * n]) + 2.0 * s * trotter;
            if rng.gen::<f64>() < heat_bath_probability(delta, 1.0) {
                spins[idx] = -spins[idx];
            }
        }
        if step >= equil_steps {
            stats.record(&mut scratch, step, [&spins[center * n..(center + 1) * n]]);
            let s = scratch.samples.pop().expect("just recorded");
            energies.push(s.avg_energy);
            hits += s.ground_hits;
            mag += s.magnetization;
        }
    }
    let mut record = RunRecord::new(rng::sub_seed(seed, 0, 0), McMethod::Pimc { m });
    record.push(equil_steps + measure_steps, &energies, hits, mag / measure_steps as f64);
    Ok(record)
}
