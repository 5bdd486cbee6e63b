use num_complex::Complex64;

use super::trajectory::validate_samples;
use super::{check_exact_size, ExactSystem, OverlapTrajectory, QuantumState, TrajectoryLabel};
use crate::error::{Error, Result};
use crate::ising::{enumerate_ground_states, IsingInstance};
use crate::schedule::Schedule;

/// Step control for the fourth-order Runge-Kutta integrators.
///
/// Each step uses `dt = min(dt_max, courant / ‖H(Γ) - s‖)`, with `s` the
/// running energy estimate, so `dt` follows the spectral width as `Γ(t)`
/// shrinks.
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub dt_max: f64,
    pub courant: f64,
    /// Starting state; the uniform superposition when `None`.
    pub initial: Option<QuantumState>,
    /// Largest tolerated `|‖ψ‖² - 1|` in real time.
    pub norm_tolerance: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt_max: 0.05, courant: 0.1, initial: None, norm_tolerance: 1e-6 }
    }
}

impl EvolveOptions {
    fn validate(&self) -> Result<()> {
        if !(self.dt_max > 0.0 && self.courant > 0.0 && self.courant <= 2.0 && self.norm_tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!("bad integrator options {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq)]
pub(crate) enum Mode {
    Real,
    Imaginary,
}

/// `P_QA(t)` under `i dψ/dt = H(t) ψ`, starting from the uniform
/// superposition at `schedule.t_start`.
pub fn evolve_schrodinger(
    instance: &IsingInstance,
    schedule: &Schedule,
    t_end: f64,
    sample_times: &[f64],
    options: &EvolveOptions,
) -> Result<OverlapTrajectory> {
    evolve(instance, schedule, t_end, sample_times, options, Mode::Real).map(|(tr, _)| tr)
}

/// As [`evolve_schrodinger`] with `t → -iτ`: `dψ/dτ = -H(τ) ψ`,
/// renormalised after every step.
pub fn evolve_imaginary_time(
    instance: &IsingInstance,
    schedule: &Schedule,
    t_end: f64,
    sample_times: &[f64],
    options: &EvolveOptions,
) -> Result<OverlapTrajectory> {
    evolve(instance, schedule, t_end, sample_times, options, Mode::Imaginary).map(|(tr, _)| tr)
}

/// Same integration, returning the final state as well.
pub(crate) fn evolve(
    instance: &IsingInstance,
    schedule: &Schedule,
    t_end: f64,
    sample_times: &[f64],
    options: &EvolveOptions,
    mode: Mode,
) -> Result<(OverlapTrajectory, QuantumState)> {
    check_exact_size(instance.n_spins())?;
    options.validate()?;
    let t0 = schedule.t_start;
    validate_samples(t0, t_end, sample_times)?;
    schedule.value(t0)?;
    let sys = ExactSystem::new(instance)?;
    let cert = enumerate_ground_states(instance)?;
    let mut psi = match &options.initial {
        Some(s) if s.n_spins() != sys.n_spins() => {
            return Err(Error::SizeMismatch { expected: sys.dim(), got: s.dim() });
        }
        Some(s) => s.clone(),
        None => QuantumState::uniform(sys.n_spins()),
    };
    let label = match mode {
        Mode::Real => TrajectoryLabel::P_QA,
        Mode::Imaginary => TrajectoryLabel::P_QA_imaginary,
    };
    let mut traj = OverlapTrajectory::new(label);
    let mut rk = Rk4::new(sys.dim());
    let mut t = t0;
    let mut shift = sys.energy(schedule.value_unchecked(t), psi.amplitudes());
    let norm0 = psi.norm_sqr();
    let mut steps: u64 = 0;
    for &target in sample_times {
        while t < target {
            let g_now = schedule.value_unchecked(t).abs();
            let mut dt = options.dt_max.min(options.courant / sys.spectral_bound(g_now, shift));
            let g_next = schedule.value_unchecked((t + dt).min(target)).abs();
            if g_next > g_now {
                dt = dt.min(options.courant / sys.spectral_bound(g_next, shift));
            }
            // Land exactly on the sample time.
            if t + dt >= target || target - (t + dt) < 1e-3 * dt {
                dt = target - t;
            }
            rk.step(&sys, schedule, t, dt, shift, mode, psi.amplitudes_mut());
            t = if t + dt >= target { target } else { t + dt };
            steps += 1;
            if mode == Mode::Imaginary {
                psi.normalize();
            }
            if steps % 64 == 0 {
                let nrm = psi.norm_sqr();
                if mode == Mode::Real && (nrm - norm0).abs() > options.norm_tolerance {
                    return Err(Error::Integration {
                        t,
                        reason: format!("norm drift {:.3e} after {steps} steps (dt = {dt:.3e})", nrm - norm0),
                    });
                }
                shift = sys.energy(schedule.value_unchecked(t), psi.amplitudes()) / nrm;
            }
        }
        traj.push(target, psi.ground_probability(&cert) / psi.norm_sqr());
    }
    let drift = psi.norm_sqr() - norm0;
    if mode == Mode::Real && drift.abs() > options.norm_tolerance {
        return Err(Error::Integration { t, reason: format!("norm drift {drift:.3e} after {steps} steps") });
    }
    log::debug!("{label} integration: {steps} steps, norm drift {drift:.3e}");
    Ok((traj, psi))
}

struct Rk4 {
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4 {
    fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Self { k: [z.clone(), z.clone(), z.clone(), z.clone()], tmp: z }
    }

    /// One step of `dψ/dt = f (H - s) ψ` with `f = -i` or `-1`.
    #[allow(clippy::too_many_arguments)]
    fn step(&mut self, sys: &ExactSystem, sched: &Schedule, t: f64, dt: f64, shift: f64, mode: Mode, psi: &mut [Complex64]) {
        let f = match mode {
            Mode::Real => Complex64::new(0.0, -1.0),
            Mode::Imaginary => Complex64::new(-1.0, 0.0),
        };
        let g = [sched.value_unchecked(t), sched.value_unchecked(t + 0.5 * dt), sched.value_unchecked(t + dt)];
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        sys.apply_shifted(g[0], shift, psi, k1);
        k1.iter_mut().for_each(|x| *x *= f);
        axpy(tmp, psi, 0.5 * dt, k1);
        sys.apply_shifted(g[1], shift, tmp, k2);
        k2.iter_mut().for_each(|x| *x *= f);
        axpy(tmp, psi, 0.5 * dt, k2);
        sys.apply_shifted(g[1], shift, tmp, k3);
        k3.iter_mut().for_each(|x| *x *= f);
        axpy(tmp, psi, dt, k3);
        sys.apply_shifted(g[2], shift, tmp, k4);
        k4.iter_mut().for_each(|x| *x *= f);
        let w = dt / 6.0;
        for i in 0..psi.len() {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }
}

fn axpy(out: &mut [Complex64], x: &[Complex64], a: f64, y: &[Complex64]) {
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + yi * a;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::stationary_ground_state;
    use crate::ising::{make_ferromagnet, make_sk};

    #[test]
    fn eigenstate_of_classical_hamiltonian_stays_put() {
        let inst = make_sk(6, 3).unwrap();
        let cert = enumerate_ground_states(&inst).unwrap();
        let sched = Schedule::constant(0.0).unwrap();
        let opts = EvolveOptions { initial: Some(QuantumState::basis(6, cert.basis_indices()[0])), ..Default::default() };
        let tr = evolve_schrodinger(&inst, &sched, 50.0, &[1.0, 10.0, 50.0], &opts).unwrap();
        assert!(tr.values().all(|p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn zero_duration_gives_initial_overlap() {
        let inst = make_ferromagnet(5, 1.0).unwrap();
        let sched = Schedule::inverse(3.0).unwrap();
        let tr = evolve_imaginary_time(&inst, &sched, sched.t_start, &[sched.t_start], &Default::default()).unwrap();
        assert!((tr.samples[0].1 - 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn imaginary_time_reaches_eigenstate_and_lowers_energy() {
        let inst = make_sk(5, 21).unwrap();
        let gamma = 0.6;
        let sched = Schedule::constant(gamma).unwrap();
        let sys = ExactSystem::new(&inst).unwrap();
        let mut e_prev = f64::INFINITY;
        let mut psi = QuantumState::uniform(5);
        let mut t = 0.0;
        for t_next in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0] {
            let opts = EvolveOptions { initial: Some(psi.clone()), ..Default::default() };
            let sched = sched.with_t_start(t).unwrap();
            let (_, out) = evolve(&inst, &sched, t_next, &[t_next], &opts, Mode::Imaginary).unwrap();
            let e = sys.energy(gamma, out.amplitudes());
            assert!(e <= e_prev + 1e-12, "energy rose at τ={t_next}: {e} > {e_prev}");
            e_prev = e;
            psi = out;
            t = t_next;
        }
        let gs = stationary_ground_state(&inst, gamma).unwrap();
        assert!(gs.state.inner(&psi).norm_sqr() >= 1.0 - 1e-6);
    }

    #[test]
    fn two_level_rabi_oscillation() {
        // h = 0, constant Γ: P(up) = cos²(Γt) starting from |up⟩.
        let inst = IsingInstance::from_pairs(1, [], 0.0, crate::ising::Topology::Complete).unwrap();
        let sched = Schedule::constant(0.7).unwrap();
        let opts = EvolveOptions { initial: Some(QuantumState::basis(1, 0)), ..Default::default() };
        let times = [0.3, 1.1, 2.9];
        for &t in &times {
            let (_, psi) = evolve(&inst, &sched, t, &[t], &opts, Mode::Real).unwrap();
            let p_up = psi.amplitudes()[0].norm_sqr();
            assert!((p_up - (0.7 * t).cos().powi(2)).abs() < 1e-7, "t={t} {p_up}");
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let inst = make_ferromagnet(3, 1.0).unwrap();
        let sched = Schedule::inverse_sqrt(3.0).unwrap();
        let o = EvolveOptions::default();
        assert!(evolve_schrodinger(&inst, &sched, 10.0, &[2.0, 1.0], &o).is_err());
        assert!(evolve_schrodinger(&inst, &sched, 10.0, &[20.0], &o).is_err());
        let lin = Schedule::linear_negative(1.0).unwrap();
        assert!(evolve_schrodinger(&inst, &lin, 0.0, &[0.0], &o).is_err());
    }
}
