use nalgebra::DMatrix;

use super::trajectory::validate_samples;
use super::{check_exact_size, OverlapTrajectory, ProbabilityVector, TrajectoryLabel};
use crate::error::{Error, Result};
use crate::ising::{enumerate_ground_states, IsingInstance};
use crate::schedule::Schedule;

/// Heat-bath probability of moving from energy `e_from` to `e_to` at
/// temperature `t`: `e^{-E_to/T} / (e^{-E_to/T} + e^{-E_from/T})`.
#[inline]
pub fn heat_bath_rate(e_from: f64, e_to: f64, t: f64) -> f64 {
    1.0 / (1.0 + ((e_to - e_from) / t).exp())
}

/// The single-spin-flip master-equation generator `L(T)` in matrix-free
/// form. `L_ji` (`j ≠ i`) is the rate from `i` to `j`; columns sum to zero.
#[derive(Debug, Clone)]
pub struct TransitionGenerator {
    n: usize,
    diag: Vec<f64>,
    temperature: f64,
}

/// Generator for temperature `t > 0`.
pub fn build_transition_matrix(instance: &IsingInstance, t: f64) -> Result<TransitionGenerator> {
    check_exact_size(instance.n_spins())?;
    TransitionGenerator::from_energies(instance.n_spins(), instance.diagonal_energies(), t)
}

impl TransitionGenerator {
    pub(crate) fn from_energies(n: usize, diag: Vec<f64>, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("temperature must be positive, got {t}")));
        }
        Ok(Self { n, diag, temperature: t })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `L_ji`: the rate into `j` from `i`, including the diagonal.
    pub fn rate(&self, j: usize, i: usize) -> f64 {
        if i == j {
            return -self.exit_rate(i);
        }
        if (i ^ j).count_ones() != 1 {
            return 0.0;
        }
        heat_bath_rate(self.diag[i], self.diag[j], self.temperature)
    }

    fn exit_rate(&self, i: usize) -> f64 {
        (0..self.n).map(|k| heat_bath_rate(self.diag[i], self.diag[i ^ (1 << k)], self.temperature)).sum()
    }

    /// `out = L p`.
    pub fn apply(&self, p: &[f64], out: &mut [f64]) {
        apply_at(self.n, &self.diag, self.temperature, p, out);
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |j, i| self.rate(j, i))
    }
}

fn apply_at(n: usize, diag: &[f64], temp: f64, p: &[f64], out: &mut [f64]) {
    let mut rates = vec![0.0; diag.len() * n];
    fill_rates(n, diag, temp, &mut rates);
    apply_rates(n, &rates, p, out);
}

/// `rates[i·n + k]` is the rate out of `i` into `i ^ (1 << k)`; one
/// exponential per pair.
fn fill_rates(n: usize, diag: &[f64], temp: f64, rates: &mut [f64]) {
    for i in 0..diag.len() {
        for k in 0..n {
            let j = i ^ (1 << k);
            if j < i {
                continue;
            }
            let de = diag[j] - diag[i];
            let x = (-de.abs() / temp).exp();
            let (down, up) = (1.0 / (1.0 + x), x / (1.0 + x));
            let (ij, ji) = if de > 0.0 { (up, down) } else { (down, up) };
            rates[i * n + k] = ij;
            rates[j * n + k] = ji;
        }
    }
}

fn apply_rates(n: usize, rates: &[f64], p: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in 0..n {
            let j = i ^ (1 << k);
            acc += rates[j * n + k] * p[j] - rates[i * n + k] * p[i];
        }
        *o = acc;
    }
}

/// Step control for [`master_evolve`].
#[derive(Debug, Clone)]
pub struct MasterOptions {
    pub dt_max: f64,
    /// `dt ≤ stability / max|L_ii|`.
    pub stability: f64,
    /// Starting distribution; uniform when `None`.
    pub initial: Option<ProbabilityVector>,
    /// Step rejections (each halving `dt`) allowed in a row.
    pub max_halvings: u32,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self { dt_max: 0.1, stability: 0.1, initial: None, max_halvings: 30 }
    }
}

/// `P_SA(t)` from `dP/dt = L(T(t)) P`, starting uniform at
/// `schedule.t_start`.
pub fn master_evolve(
    instance: &IsingInstance,
    schedule: &Schedule,
    t_end: f64,
    sample_times: &[f64],
    options: &MasterOptions,
) -> Result<OverlapTrajectory> {
    master_evolve_full(instance, schedule, t_end, sample_times, options).map(|(tr, _)| tr)
}

pub(crate) fn master_evolve_full(
    instance: &IsingInstance,
    schedule: &Schedule,
    t_end: f64,
    sample_times: &[f64],
    options: &MasterOptions,
) -> Result<(OverlapTrajectory, ProbabilityVector)> {
    check_exact_size(instance.n_spins())?;
    if !(options.dt_max > 0.0 && options.stability > 0.0) {
        return Err(Error::InvalidParameter(format!("bad master-equation options {options:?}")));
    }
    let t0 = schedule.t_start;
    validate_samples(t0, t_end, sample_times)?;
    let n = instance.n_spins();
    let diag = instance.diagonal_energies();
    let cert = enumerate_ground_states(instance)?;
    let dim = diag.len();
    let mut p = match &options.initial {
        Some(v) if v.probs.len() != dim => return Err(Error::SizeMismatch { expected: dim, got: v.probs.len() }),
        Some(v) => v.probs.clone(),
        None => ProbabilityVector::uniform(n).probs,
    };
    let temp_at = |t: f64| -> Result<f64> {
        let temp = schedule.value_unchecked(t);
        if temp > 0.0 && temp.is_finite() {
            Ok(temp)
        } else {
            Err(Error::Domain(format!("temperature {temp} at t = {t} is not positive")))
        }
    };
    // Every exit rate is below one per spin.
    let dt_cap = options.dt_max.min(options.stability / n.max(1) as f64);
    let mut traj = OverlapTrajectory::new(TrajectoryLabel::P_SA);
    let mut k = [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]];
    let mut tmp = vec![0.0; dim];
    let mut rates = [vec![0.0; dim * n], vec![0.0; dim * n], vec![0.0; dim * n]];
    let mut next = vec![0.0; dim];
    let mut t = t0;
    for &target in sample_times {
        while t < target {
            let mut dt = dt_cap.min(target - t);
            if target - (t + dt) < 1e-3 * dt {
                dt = target - t;
            }
            let mut halvings = 0;
            loop {
                let [r0, r1, r2] = &mut rates;
                fill_rates(n, &diag, temp_at(t)?, r0);
                fill_rates(n, &diag, temp_at(t + 0.5 * dt)?, r1);
                fill_rates(n, &diag, temp_at(t + dt)?, r2);
                let [k1, k2, k3, k4] = &mut k;
                apply_rates(n, r0, &p, k1);
                step_into(&mut tmp, &p, 0.5 * dt, k1);
                apply_rates(n, r1, &tmp, k2);
                step_into(&mut tmp, &p, 0.5 * dt, k2);
                apply_rates(n, r1, &tmp, k3);
                step_into(&mut tmp, &p, dt, k3);
                apply_rates(n, r2, &tmp, k4);
                for i in 0..dim {
                    next[i] = p[i] + dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
                }
                if next.iter().all(|&x| x >= -1e-14) {
                    break;
                }
                halvings += 1;
                if halvings > options.max_halvings {
                    return Err(Error::Integration { t, reason: format!("negative probability persists at dt = {dt:.3e}") });
                }
                dt *= 0.5;
            }
            std::mem::swap(&mut p, &mut next);
            p.iter_mut().for_each(|x| *x = x.max(0.0));
            t = if t + dt >= target { target } else { t + dt };
        }
        traj.push(target, cert.basis_indices().iter().map(|&i| p[i]).sum::<f64>() / p.iter().sum::<f64>());
    }
    Ok((traj, ProbabilityVector { probs: p }))
}

fn step_into(out: &mut [f64], x: &[f64], a: f64, y: &[f64]) {
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}
