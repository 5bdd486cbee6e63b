use rand::Rng as _;
use rayon::prelude::*;

use super::record::{McMethod, RunRecord};
use super::{heat_bath_probability, random_spins, McPlan, ReplicaStats};
use crate::error::{Error, Result};
use crate::ising::{GroundMethod, GroundStateCertificate, IsingInstance, SpinConfiguration};
use crate::rng::{self, Rng};
use crate::schedule::Schedule;

/// Result of one classical annealing run.
#[derive(Debug, Clone)]
pub struct SaOutcome {
    pub record: RunRecord,
    pub final_config: SpinConfiguration,
}

/// Independent simulated-annealing runs with heat-bath single-spin updates.
///
/// Step `s` (`s = 1..=mc_steps`) performs `N` trials at uniformly random
/// sites. Trial `j` of step `s` sits at time `s - 1 + j/N` (`j = 1..=N`)
/// and uses the temperature there, so `N` trials advance the clock by one
/// unit exactly as one unit of the continuous-time master equation does. Run `r` draws from
/// `rng::stream(seed, r, 0)`, so the output is independent of thread count.
pub fn run_sa(
    instance: &IsingInstance,
    schedule: &Schedule,
    plan: &McPlan,
    n_runs: usize,
    seed: u64,
) -> Result<Vec<RunRecord>> {
    Ok(run_sa_outcomes(instance, schedule, plan, n_runs, seed)?
        .into_iter()
        .map(|o| o.record)
        .collect())
}

/// As [`run_sa`], also returning each run's final configuration.
pub fn run_sa_outcomes(
    instance: &IsingInstance,
    schedule: &Schedule,
    plan: &McPlan,
    n_runs: usize,
    seed: u64,
) -> Result<Vec<SaOutcome>> {
    plan.validate()?;
    if n_runs == 0 {
        return Err(Error::InvalidParameter("n_runs must be at least 1".into()));
    }
    plan.schedule_values(schedule, "temperature")?;
    let first = schedule.value(1.0 / instance.n_spins() as f64)?;
    if !(first > 0.0 && first.is_finite()) {
        return Err(Error::Domain(format!("temperature must stay positive during the run, got {first}")));
    }
    (0..n_runs as u64)
        .into_par_iter()
        .map(|run| {
            let mut rng = rng::stream(seed, run, 0);
            let spins = random_spins(instance.n_spins(), &mut rng);
            Ok(anneal_one(instance, schedule, plan, spins, rng::sub_seed(seed, run, 0), &mut rng))
        })
        .collect()
}

pub(crate) fn anneal_one(
    instance: &IsingInstance,
    schedule: &Schedule,
    plan: &McPlan,
    mut spins: Vec<i8>,
    record_seed: u64,
    rng: &mut Rng,
) -> SaOutcome {
    let n = instance.n_spins();
    let mut record = RunRecord::new(record_seed, McMethod::Sa);
    let stats = ReplicaStats::new(instance, plan.ground_energy);
    let mut next = 0;
    if plan.record_at.first() == Some(&0) {
        stats.record(&mut record, 0, [&spins[..]]);
        next = 1;
    }
    let inv_n = 1.0 / n as f64;
    for step in 1..=plan.mc_steps {
        let t0 = (step - 1) as f64;
        for j in 0..n {
            let temp = schedule.value_unchecked(t0 + (j + 1) as f64 * inv_n);
            let i = rng.gen_range(0..n);
            let p = heat_bath_probability(instance.flip_delta(i, &spins), temp);
            if rng.gen::<f64>() < p {
                spins[i] = -spins[i];
            }
        }
        if plan.record_at.get(next) == Some(&step) {
            stats.record(&mut record, step, [&spins[..]]);
            next += 1;
        }
    }
    let final_config = SpinConfiguration::new(spins).expect("spins stay ±1");
    SaOutcome { record, final_config }
}

/// Ground-state estimate from `n_runs` slow anneals at `T = 3 / ln(t + 1)`
/// followed by a zero-temperature descent; for instances too large to
/// enumerate.
pub fn long_sa_ground(
    instance: &IsingInstance,
    n_runs: usize,
    mc_steps: u64,
    seed: u64,
) -> Result<GroundStateCertificate> {
    let plan = McPlan::new(mc_steps).with_record_at(vec![mc_steps]);
    let outcomes = run_sa_outcomes(instance, &Schedule::inverse_log(3.0)?, &plan, n_runs, seed)?;
    let mut best: Vec<(f64, SpinConfiguration)> = outcomes
        .into_iter()
        .enumerate()
        .map(|(run, o)| {
            let c = super::zero_t_quench(instance, &o.final_config, 10, rng::sub_seed(seed, run as u64, 1));
            (instance.energy_of(c.spins()), c)
        })
        .collect();
    let energy = best.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    best.retain(|b| crate::ising::energy_tie(b.0, energy));
    let mut configurations: Vec<SpinConfiguration> = best.into_iter().map(|b| b.1).collect();
    configurations.sort();
    configurations.dedup();
    Ok(GroundStateCertificate { energy, configurations, method: GroundMethod::LongSA })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{enumerate_ground_states, make_sk};
    use crate::mc::merge_records;

    #[test]
    fn reproducible_from_seed() {
        let inst = make_sk(8, 3).unwrap();
        let plan = McPlan::new(200);
        let s = Schedule::inverse_sqrt(3.0).unwrap();
        let a = run_sa(&inst, &s, &plan, 16, 42).unwrap();
        let b = run_sa(&inst, &s, &plan, 16, 42).unwrap();
        assert_eq!(a, b);
        let c = run_sa(&inst, &s, &plan, 16, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn frozen_at_ground_state() {
        let inst = make_sk(8, 3).unwrap();
        let cert = enumerate_ground_states(&inst).unwrap();
        let start = cert.configurations[0].spins().to_vec();
        let plan = McPlan::new(1000).with_ground(cert.energy).with_record_at(vec![1000]);
        let mut rng = rng::stream(1, 0, 0);
        let out = anneal_one(&inst, &Schedule::constant(1e-6).unwrap(), &plan, start.clone(), 0, &mut rng);
        assert_eq!(out.final_config.spins(), &start[..]);
        assert_eq!(out.record.last().unwrap().ground_hits, 1);
    }

    #[test]
    fn fixed_temperature_samples_boltzmann() {
        let inst = make_sk(3, 5).unwrap();
        let temp = 0.7;
        let diag = inst.diagonal_energies();
        let weights: Vec<f64> = diag.iter().map(|e| (-e / temp).exp()).collect();
        let z: f64 = weights.iter().sum();
        let mut counts = [0u64; 8];
        let mut rng = rng::stream(9, 0, 0);
        let mut spins = vec![1i8; 3];
        let sweeps = 400_000;
        for _ in 0..sweeps {
            for _ in 0..3 {
                let i = rng.gen_range(0..3);
                if rng.gen::<f64>() < heat_bath_probability(inst.flip_delta(i, &spins), temp) {
                    spins[i] = -spins[i];
                }
            }
            counts[SpinConfiguration::new(spins.clone()).unwrap().to_index()] += 1;
        }
        for (k, &c) in counts.iter().enumerate() {
            let p = weights[k] / z;
            let f = c as f64 / sweeps as f64;
            // Consecutive sweeps are correlated; allow a generous factor.
            let sigma = (p * (1.0 - p) / sweeps as f64).sqrt() * 4.0;
            assert!((f - p).abs() < 3.0 * sigma + 1e-4, "state {k}: {f} vs {p}");
        }
    }

    #[test]
    fn long_sa_agrees_with_enumeration() {
        let inst = make_sk(8, 11).unwrap();
        let exact = enumerate_ground_states(&inst).unwrap();
        let long = long_sa_ground(&inst, 100, 2000, 5).unwrap();
        assert!(exact.is_ground_energy(long.energy));
        assert_eq!(long.method, GroundMethod::LongSA);
    }

    #[test]
    fn slow_anneal_mostly_finds_ground() {
        let inst = make_sk(8, 11).unwrap();
        let cert = enumerate_ground_states(&inst).unwrap();
        let plan = McPlan::new(2000).with_ground(cert.energy);
        let recs = run_sa(&inst, &Schedule::inverse_sqrt(3.0).unwrap(), &plan, 64, 1).unwrap();
        let merged = merge_records(&recs).unwrap();
        let last = merged.last().unwrap();
        assert_eq!(last.n_replicas, 64);
        assert!(last.ground_fraction() > 0.5, "{}", last.ground_fraction());
    }
}
