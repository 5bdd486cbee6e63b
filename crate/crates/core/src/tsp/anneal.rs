use std::io::Write;

use rand::Rng as _;
use rayon::prelude::*;

use super::instance::{cycle_length, swap_delta};
use super::{Tour, TspInstance};
use crate::error::{Error, Result};
use crate::ising::energy_tie;
use crate::mc::{heat_bath_probability, merge_records, trotter_coupling, McMethod, McPlan, RunRecord, RUN_RECORD_CSV_HEADER};
use crate::rng::{self, Rng};
use crate::schedule::Schedule;

/// Annealing trajectory for tours.
///
/// In `record`, `avg_energy` is the mean tour length, `ground_hits` counts
/// replicas whose length equals `plan.ground_energy` (the optimum) within
/// `1e-9` relative, and `magnetization` is the mean spin of the unit
/// encoding, `(2 - N)/N` for every valid tour. `best_length[k]` is the
/// shortest replica at sample `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TspRecord {
    pub record: RunRecord,
    pub best_length: Vec<f64>,
}

impl TspRecord {
    pub const CSV_HEADER_SUFFIX: &'static str = ",best_length,optimal_hits";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{RUN_RECORD_CSV_HEADER}{}", Self::CSV_HEADER_SUFFIX)?;
        for (s, best) in self.record.samples.iter().zip(&self.best_length) {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                s.mc_step, s.rescaled_time, s.avg_energy, s.ground_hits, s.n_replicas, s.magnetization, best, s.ground_hits
            )?;
        }
        Ok(())
    }
}

/// Pool records on a shared step grid; order-independent.
pub fn merge_tsp_records(records: &[TspRecord]) -> Result<TspRecord> {
    let plain: Vec<RunRecord> = records.iter().map(|r| r.record.clone()).collect();
    let record = merge_records(&plain)?;
    let best_length = (0..record.samples.len())
        .map(|k| records.iter().map(|r| r.best_length[k]).fold(f64::INFINITY, f64::min))
        .collect();
    Ok(TspRecord { record, best_length })
}

/// Exchange trials per replica per Monte Carlo step: `(N-1)(N-2)/2`.
pub fn trials_per_step(n: usize) -> usize {
    (n - 1) * (n - 2) / 2
}

fn random_stop_pair(n: usize, rng: &mut Rng) -> (usize, usize) {
    let a = rng.gen_range(1..n);
    let mut b = rng.gen_range(1..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

struct Recorder<'a> {
    instance: &'a TspInstance,
    optimum: Option<f64>,
    record: RunRecord,
    best: Vec<f64>,
}

impl<'a> Recorder<'a> {
    fn new(instance: &'a TspInstance, optimum: Option<f64>, seed: u64, method: McMethod) -> Self {
        Self { instance, optimum, record: RunRecord::new(seed, method), best: Vec::new() }
    }

    fn record<'t>(&mut self, step: u64, tours: impl IntoIterator<Item = &'t Tour>) {
        let lengths: Vec<f64> = tours.into_iter().map(|t| cycle_length(self.instance, t.order())).collect();
        let hits = match self.optimum {
            Some(opt) => lengths.iter().filter(|&&l| energy_tie(l, opt)).count() as u64,
            None => 0,
        };
        let n = self.instance.n_cities() as f64;
        self.record.push(step, &lengths, hits, (2.0 - n) / n);
        self.best.push(lengths.iter().copied().fold(f64::INFINITY, f64::min));
    }

    fn finish(self) -> TspRecord {
        TspRecord { record: self.record, best_length: self.best }
    }
}

fn check_size(instance: &TspInstance) -> Result<()> {
    if instance.n_cities() < 4 {
        return Err(Error::InvalidParameter("annealing needs at least 4 cities".into()));
    }
    Ok(())
}

/// Classical annealing by pairwise stop exchange.
///
/// Each step performs `(N-1)(N-2)/2` trials at `T = schedule(step)`; a trial
/// picks two stops other than stop 0 and swaps their cities with heat-bath
/// probability `1 / (1 + e^{ΔL/T})`.
pub fn sa_tsp(instance: &TspInstance, schedule: &Schedule, plan: &McPlan, n_runs: usize, seed: u64) -> Result<Vec<TspRecord>> {
    Ok(sa_tsp_tours(instance, schedule, plan, n_runs, seed)?.into_iter().map(|r| r.0).collect())
}

/// As [`sa_tsp`], also returning each run's final tour.
pub fn sa_tsp_tours(
    instance: &TspInstance,
    schedule: &Schedule,
    plan: &McPlan,
    n_runs: usize,
    seed: u64,
) -> Result<Vec<(TspRecord, Tour)>> {
    check_size(instance)?;
    plan.validate()?;
    if n_runs == 0 {
        return Err(Error::InvalidParameter("n_runs must be at least 1".into()));
    }
    let temps = plan.schedule_values(schedule, "temperature")?;
    let n = instance.n_cities();
    Ok((0..n_runs as u64)
        .into_par_iter()
        .map(|run| {
            let mut rng = rng::stream(seed, run, 0);
            let mut tour = Tour::random(n, &mut rng);
            let mut rec = Recorder::new(instance, plan.ground_energy, rng::sub_seed(seed, run, 0), McMethod::Sa);
            let mut pending = plan.record_at.iter().copied().peekable();
            if pending.peek() == Some(&0) {
                rec.record(0, [&tour]);
                pending.next();
            }
            for (step, &temp) in (1..=plan.mc_steps).zip(&temps) {
                for _ in 0..trials_per_step(n) {
                    let (a, b) = random_stop_pair(n, &mut rng);
                    let d = swap_delta(instance, tour.order(), a, b);
                    if rng.gen::<f64>() < heat_bath_probability(d, temp) {
                        tour.swap_stops(a, b);
                    }
                }
                if pending.peek() == Some(&step) {
                    rec.record(step, [&tour]);
                    pending.next();
                }
            }
            (rec.finish(), tour)
        })
        .collect())
}

/// `M` tours coupled along a periodic Trotter direction through their
/// unit encodings.
#[derive(Debug, Clone, PartialEq)]
pub struct TourSliceArray {
    pub tours: Vec<Tour>,
    pub beta_eff: f64,
    gamma: f64,
    gamma_m: f64,
}

impl TourSliceArray {
    pub fn new(tours: Vec<Tour>, beta_eff: f64, gamma: f64) -> Result<Self> {
        if tours.len() < 2 {
            return Err(Error::InvalidParameter(format!("Trotter number must be at least 2, got {}", tours.len())));
        }
        let gamma_m = trotter_coupling(gamma, beta_eff, tours.len())?;
        Ok(Self { tours, beta_eff, gamma, gamma_m })
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
            self.gamma_m = trotter_coupling(gamma, self.beta_eff, self.tours.len())?;
            self.gamma = gamma;
        }
        Ok(())
    }

    /// `σ_ia` of slice `k`.
    #[inline]
    fn spin(&self, k: usize, city: usize, stop: usize) -> f64 {
        if self.tours[k].order()[stop] == city {
            1.0
        } else {
            -1.0
        }
    }

    /// Change of `-Σ_k Σ_ia σ^k_ia σ^{k+1}_ia` when stops `a` and `b` of
    /// slice `k` swap cities: four units flip.
    pub fn alignment_delta(&self, k: usize, a: usize, b: usize) -> f64 {
        let m = self.tours.len();
        let (prev, next) = ((k + m - 1) % m, (k + 1) % m);
        let order = self.tours[k].order();
        let (x, y) = (order[a], order[b]);
        let field = |city: usize, stop: usize| self.spin(prev, city, stop) + self.spin(next, city, stop);
        // σ: (x,a), (y,b) go +1 → -1; (x,b), (y,a) go -1 → +1.
        2.0 * (field(x, a) + field(y, b) - field(x, b) - field(y, a))
    }

    /// `β_eff ΔL + β_eff Γ_M Δ(alignment)` for the proposed swap.
    pub fn action_delta(&self, instance: &TspInstance, k: usize, a: usize, b: usize) -> f64 {
        let dl = swap_delta(instance, self.tours[k].order(), a, b);
        self.beta_eff * (dl + self.gamma_m * self.alignment_delta(k, a, b))
    }

    /// Full dimensionless action, for checks.
    pub fn action(&self, instance: &TspInstance) -> f64 {
        let m = self.tours.len();
        let n = instance.n_cities();
        let lengths: f64 = self.tours.iter().map(|t| cycle_length(instance, t.order())).sum();
        let mut align = 0.0;
        for k in 0..m {
            for city in 0..n {
                for stop in 0..n {
                    align += self.spin(k, city, stop) * self.spin((k + 1) % m, city, stop);
                }
            }
        }
        self.beta_eff * (lengths - self.gamma_m * align)
    }

    /// One Monte Carlo step: slices in order, `(N-1)(N-2)/2` random-pair
    /// heat-bath trials in each.
    pub fn sweep(&mut self, instance: &TspInstance, rng: &mut Rng) {
        let n = instance.n_cities();
        for k in 0..self.tours.len() {
            for _ in 0..trials_per_step(n) {
                let (a, b) = random_stop_pair(n, rng);
                let d = self.action_delta(instance, k, a, b);
                if rng.gen::<f64>() < heat_bath_probability(d, 1.0) {
                    self.tours[k].swap_stops(a, b);
                }
            }
        }
    }
}

/// Quantum annealing of tours on `m` Trotter slices (run index 0 of `seed`).
///
/// Slice `k` starts from a random tour drawn from `rng::stream(seed, 0, k+1)`;
/// `Γ = schedule(step)` for the whole step. Recorded lengths exclude the
/// Trotter term.
pub fn qa_tsp(
    instance: &TspInstance,
    schedule: &Schedule,
    beta_eff: f64,
    m: usize,
    plan: &McPlan,
    seed: u64,
) -> Result<TspRecord> {
    qa_tsp_run(instance, schedule, beta_eff, m, plan, seed, 0).map(|r| r.0)
}

/// `n_runs` independent [`qa_tsp`] runs in parallel (run indices `0..n_runs`).
pub fn qa_tsp_ensemble(
    instance: &TspInstance,
    schedule: &Schedule,
    beta_eff: f64,
    m: usize,
    plan: &McPlan,
    n_runs: usize,
    seed: u64,
) -> Result<Vec<TspRecord>> {
    if n_runs == 0 {
        return Err(Error::InvalidParameter("n_runs must be at least 1".into()));
    }
    (0..n_runs as u64)
        .into_par_iter()
        .map(|run| qa_tsp_run(instance, schedule, beta_eff, m, plan, seed, run).map(|r| r.0))
        .collect()
}

/// [`qa_tsp`] for run index `run`, also returning the final slices.
pub fn qa_tsp_run(
    instance: &TspInstance,
    schedule: &Schedule,
    beta_eff: f64,
    m: usize,
    plan: &McPlan,
    seed: u64,
    run: u64,
) -> Result<(TspRecord, TourSliceArray)> {
    check_size(instance)?;
    plan.validate()?;
    let gammas = plan.schedule_values(schedule, "transverse field")?;
    let n = instance.n_cities();
    let tours = (0..m as u64).map(|k| Tour::random(n, &mut rng::stream(seed, run, k + 1))).collect();
    let mut slices = TourSliceArray::new(tours, beta_eff, gammas[0])?;
    let mut rng = rng::stream(seed, run, 0);
    let mut rec = Recorder::new(instance, plan.ground_energy, rng::sub_seed(seed, run, 0), McMethod::Qa { m });
    let mut pending = plan.record_at.iter().copied().peekable();
    if pending.peek() == Some(&0) {
        rec.record(0, &slices.tours);
        pending.next();
    }
    for (step, &gamma) in (1..=plan.mc_steps).zip(&gammas) {
        slices.set_gamma(gamma)?;
        slices.sweep(instance, &mut rng);
        if pending.peek() == Some(&step) {
            rec.record(step, &slices.tours);
            pending.next();
        }
    }
    Ok((rec.finish(), slices))
}
