use std::fmt;

use rand::{Rng as _, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::{merge_records, RunRecord};
use super::sa::run_sa_outcomes;
use super::{McPlan, QmcRun};
use crate::error::{Error, Result};
use crate::ising::{IsingInstance, SpinConfiguration};
use crate::rng;
use crate::schedule::Schedule;

/// Zero-temperature single-spin dynamics from `start`.
///
/// `sweeps` steps of `N` random-site trials accept a flip when the energy
/// strictly decreases and, on an exact tie, with probability ½. Sequential
/// passes that flip only strictly downhill spins then run until none is
/// left, so the result is a local minimum under single flips and its
/// energy never exceeds that of `start`.
pub fn zero_t_quench(instance: &IsingInstance, start: &SpinConfiguration, sweeps: u64, seed: u64) -> SpinConfiguration {
    let n = instance.n_spins();
    let mut spins = start.spins().to_vec();
    let mut rng = rng::Rng::seed_from_u64(seed);
    let tie = |d: f64| d.abs() <= 1e-12;
    for _ in 0..sweeps {
        for _ in 0..n {
            let i = rng.gen_range(0..n);
            let d = instance.flip_delta(i, &spins);
            if (d < 0.0 && !tie(d)) || (tie(d) && rng.gen::<bool>()) {
                spins[i] = -spins[i];
            }
        }
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            let d = instance.flip_delta(i, &spins);
            if d < 0.0 && !tie(d) {
                spins[i] = -spins[i];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    SpinConfiguration::new(spins).expect("spins stay ±1")
}

/// The four processes compared by [`quench_vs_anneal_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuenchProcess {
    SaAnneal,
    TQuench,
    QaAnneal,
    GammaQuench,
}

impl fmt::Display for QuenchProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuenchProcess::SaAnneal => "sa_anneal",
            QuenchProcess::TQuench => "t_quench",
            QuenchProcess::QaAnneal => "qa_anneal",
            QuenchProcess::GammaQuench => "gamma_quench",
        })
    }
}

/// Ensemble sizes and Trotter parameters for [`quench_vs_anneal_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchOptions {
    pub beta_eff: f64,
    pub m: usize,
    /// Independent classical runs per SA process.
    pub sa_runs: usize,
    /// Independent Trotter lattices per QA process.
    pub qa_runs: usize,
}

impl Default for QuenchOptions {
    fn default() -> Self {
        Self { beta_eff: 1.0, m: 20, sa_runs: 20, qa_runs: 4 }
    }
}

/// Mean energies of one process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchRow {
    pub process: QuenchProcess,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Standard error of `final_energy` over independent runs.
    pub final_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchReport {
    pub steps: u64,
    pub value: f64,
    pub rows: Vec<QuenchRow>,
    /// Merged trajectory of each process, in the order of `rows`.
    pub records: Vec<RunRecord>,
}

impl QuenchReport {
    pub fn row(&self, process: QuenchProcess) -> &QuenchRow {
        self.rows.iter().find(|r| r.process == process).expect("all four processes are reported")
    }

    pub const CSV_HEADER: &'static str = "process,initial_energy,final_energy,final_stderr";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.process, r.initial_energy, r.final_energy, r.final_stderr));
        }
        out
    }
}

/// Anneal versus quench at matched endpoints.
///
/// SA and QA follow `schedule` for `steps` steps; the quenched processes
/// hold `T` or `Γ` at `value` throughout. Every process starts from
/// random configurations drawn from the same seed, and records step 0.
pub fn quench_vs_anneal_report(
    instance: &IsingInstance,
    value: f64,
    schedule: &Schedule,
    steps: u64,
    options: &QuenchOptions,
    seed: u64,
) -> Result<QuenchReport> {
    if options.sa_runs < 2 || options.qa_runs == 0 {
        return Err(Error::InvalidParameter("need at least two SA runs and one QA run".into()));
    }
    let fixed = Schedule::constant(value)?;
    let plan = McPlan::new(steps);
    let mut record_at = vec![0];
    record_at.extend(plan.record_at.iter().copied());
    let plan = plan.with_record_at(record_at);

    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (process, sched) in [(QuenchProcess::SaAnneal, schedule), (QuenchProcess::TQuench, &fixed)] {
        let outcomes = run_sa_outcomes(instance, sched, &plan, options.sa_runs, seed)?;
        let finals: Vec<f64> = outcomes.iter().map(|o| instance.energy_of(o.final_config.spins())).collect();
        let recs: Vec<RunRecord> = outcomes.into_iter().map(|o| o.record).collect();
        push_row(&mut rows, &mut records, process, merge_records(&recs)?, &finals);
    }
    for (process, sched) in [(QuenchProcess::QaAnneal, schedule), (QuenchProcess::GammaQuench, &fixed)] {
        let runs: Vec<(RunRecord, f64)> = (0..options.qa_runs as u64)
            .into_par_iter()
            .map(|run| {
                let mut q = QmcRun::new(instance, sched, options.beta_eff, options.m, seed, run)?;
                let rec = q.run_to(instance, sched, &plan)?;
                let mean = rec.last().map_or(f64::NAN, |s| s.avg_energy);
                Ok((rec, mean))
            })
            .collect::<Result<_>>()?;
        let finals: Vec<f64> = runs.iter().map(|r| r.1).collect();
        let recs: Vec<RunRecord> = runs.into_iter().map(|r| r.0).collect();
        push_row(&mut rows, &mut records, process, merge_records(&recs)?, &finals);
    }
    Ok(QuenchReport { steps, value, rows, records })
}

fn push_row(rows: &mut Vec<QuenchRow>, records: &mut Vec<RunRecord>, process: QuenchProcess, merged: RunRecord, finals: &[f64]) {
    let count = finals.len() as f64;
    let mean = finals.iter().sum::<f64>() / count;
    let stderr = if finals.len() > 1 {
        (finals.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (count - 1.0) / count).sqrt()
    } else {
        f64::NAN
    };
    rows.push(QuenchRow {
        process,
        initial_energy: merged.samples[0].avg_energy,
        final_energy: merged.last().expect("records are non-empty").avg_energy,
        final_stderr: stderr,
    });
    records.push(merged);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{enumerate_ground_states, make_ea2d, make_sk};

    #[test]
    fn quench_never_raises_energy_and_ends_in_local_minimum() {
        let inst = make_ea2d(5, true, 3).unwrap();
        for seed in 0..20 {
            let mut r = rng::stream(seed, 0, 0);
            let start = SpinConfiguration::new(super::super::random_spins(25, &mut r)).unwrap();
            let end = zero_t_quench(&inst, &start, 5, seed);
            assert!(inst.energy_of(end.spins()) <= inst.energy_of(start.spins()) + 1e-12);
            for i in 0..25 {
                assert!(inst.flip_delta(i, end.spins()) >= -1e-12);
            }
        }
    }

    #[test]
    fn ground_state_is_a_fixed_point() {
        let inst = make_sk(8, 2).unwrap();
        let cert = enumerate_ground_states(&inst).unwrap();
        let end = zero_t_quench(&inst, &cert.configurations[0], 20, 1);
        assert!(cert.is_ground_energy(inst.energy_of(end.spins())));
    }

    #[test]
    fn small_report_has_matched_start() {
        let inst = make_ea2d(4, true, 1).unwrap();
        let opts = QuenchOptions { beta_eff: 1.0, m: 8, sa_runs: 16, qa_runs: 2 };
        let sched = Schedule::inverse_sqrt(10.0).unwrap();
        let rep = quench_vs_anneal_report(&inst, 0.1, &sched, 200, &opts, 7).unwrap();
        assert_eq!(rep.rows.len(), 4);
        let sa = rep.row(QuenchProcess::SaAnneal);
        let tq = rep.row(QuenchProcess::TQuench);
        // Same seed, same initial configurations.
        assert_eq!(sa.initial_energy, tq.initial_energy);
        assert_eq!(rep.row(QuenchProcess::QaAnneal).initial_energy, rep.row(QuenchProcess::GammaQuench).initial_energy);
        assert!(rep.to_csv().lines().count() == 5);
    }
}
