use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which solver produced a record; fixes the meaning of `rescaled_time`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McMethod {
    /// Classical annealing; one replica per run.
    Sa,
    /// Suzuki-Trotter quantum annealing; `m` replicas per run.
    Qa { m: usize },
    /// Path-integral ground-state sampling; one center slice per step.
    Pimc { m: usize },
}

impl McMethod {
    /// Computational-cost factor: `t' = factor · mc_step`.
    pub fn time_factor(self) -> u64 {
        match self {
            McMethod::Sa => 1,
            McMethod::Qa { m } | McMethod::Pimc { m } => m as u64,
        }
    }
}

/// Observables at one recorded Monte Carlo step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSample {
    pub mc_step: u64,
    pub rescaled_time: u64,
    /// Mean classical energy per replica (Trotter term excluded).
    pub avg_energy: f64,
    /// Replicas (runs or slices) sitting in a ground configuration.
    pub ground_hits: u64,
    pub n_replicas: u64,
    /// Mean of `Σσ_i / N` over replicas.
    pub magnetization: f64,
}

impl StepSample {
    /// `ground_hits / n_replicas`.
    pub fn ground_fraction(&self) -> f64 {
        if self.n_replicas == 0 {
            0.0
        } else {
            self.ground_hits as f64 / self.n_replicas as f64
        }
    }
}

/// Trajectory of one run, or of several runs after [`merge_records`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Seed of the run; for a merged record, the smallest contributing seed.
    pub seed: u64,
    pub method: McMethod,
    pub samples: Vec<StepSample>,
}

pub const RUN_RECORD_CSV_HEADER: &str = "mc_step,rescaled_time,avg_energy,ground_hits,n_replicas,magnetization";

impl RunRecord {
    pub(crate) fn new(seed: u64, method: McMethod) -> Self {
        Self { seed, method, samples: Vec::new() }
    }

    pub(crate) fn push(&mut self, mc_step: u64, energies: &[f64], hits: u64, magnetization: f64) {
        debug_assert!(self.samples.last().map_or(true, |s| s.mc_step < mc_step));
        let n = energies.len() as u64;
        self.samples.push(StepSample {
            mc_step,
            rescaled_time: mc_step * self.method.time_factor(),
            avg_energy: energies.iter().sum::<f64>() / n.max(1) as f64,
            ground_hits: hits,
            n_replicas: n,
            magnetization,
        });
    }

    pub fn last(&self) -> Option<&StepSample> {
        self.samples.last()
    }

    pub fn at_step(&self, mc_step: u64) -> Option<&StepSample> {
        self.samples
            .binary_search_by_key(&mc_step, |s| s.mc_step)
            .ok()
            .map(|i| &self.samples[i])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{RUN_RECORD_CSV_HEADER}")?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.mc_step, s.rescaled_time, s.avg_energy, s.ground_hits, s.n_replicas, s.magnetization
            )?;
        }
        Ok(())
    }
}

/// Pool records that share a method and a step grid.
///
/// Records are sorted by seed before summation, so the result does not
/// depend on the order (or thread) in which they were produced.
pub fn merge_records(records: &[RunRecord]) -> Result<RunRecord> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidParameter("no records to merge".into()))?;
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.seed);
    for r in &sorted {
        if r.method != first.method {
            return Err(Error::InvalidParameter("cannot merge records of different methods".into()));
        }
        if r.samples.len() != first.samples.len()
            || r.samples.iter().zip(&first.samples).any(|(a, b)| a.mc_step != b.mc_step)
        {
            return Err(Error::InvalidParameter("records do not share a step grid".into()));
        }
    }
    let mut merged = RunRecord::new(sorted[0].seed, first.method);
    for (k, proto) in first.samples.iter().enumerate() {
        let (mut energy, mut mag, mut hits, mut reps) = (0.0, 0.0, 0u64, 0u64);
        for r in &sorted {
            let s = &r.samples[k];
            energy += s.avg_energy * s.n_replicas as f64;
            mag += s.magnetization * s.n_replicas as f64;
            hits += s.ground_hits;
            reps += s.n_replicas;
        }
        let denom = reps.max(1) as f64;
        merged.samples.push(StepSample {
            mc_step: proto.mc_step,
            rescaled_time: proto.rescaled_time,
            avg_energy: energy / denom,
            ground_hits: hits,
            n_replicas: reps,
            magnetization: mag / denom,
        });
    }
    Ok(merged)
}

/// Validate a list of recording steps: strictly increasing and `≤ mc_steps`.
pub(crate) fn check_record_steps(record_at: &[u64], mc_steps: u64) -> Result<()> {
    if mc_steps == 0 {
        return Err(Error::InvalidParameter("mc_steps must be at least 1".into()));
    }
    if record_at.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("recording steps must be strictly increasing".into()));
    }
    if record_at.last().is_some_and(|&s| s > mc_steps) {
        return Err(Error::InvalidParameter("recording step beyond mc_steps".into()));
    }
    Ok(())
}

/// Roughly `per_decade` log-spaced integer steps in `[1, mc_steps]`,
/// always including `mc_steps`.
pub fn log_record_steps(mc_steps: u64, per_decade: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if mc_steps == 0 {
        return out;
    }
    let decades = (mc_steps as f64).log10();
    let count = (decades * per_decade as f64).ceil() as usize;
    for k in 0..=count {
        let s = 10f64.powf(k as f64 / per_decade.max(1) as f64).round() as u64;
        let s = s.clamp(1, mc_steps);
        if out.last() != Some(&s) {
            out.push(s);
        }
    }
    if out.last() != Some(&mc_steps) {
        out.push(mc_steps);
    }
    out
}
