//! Direct integration of the two-level Schrödinger equation
//! `i ȧ = -h a - Γ b`, `i ḃ = h b - Γ a` (adaptive Dormand-Prince 5(4)).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::Schedule;

/// `a = ⟨+|ψ⟩`, `b = ⟨-|ψ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePair {
    pub a: Complex64,
    pub b: Complex64,
}

impl AmplitudePair {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    /// `a = b = 1/√2`, the ground state for `Γ → +∞`.
    pub fn symmetric() -> Self {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { a: r, b: r }
    }

    /// Lowest eigenstate of `-hσ^z - Γσ^x`, real and with `a > 0`.
    pub fn ground_state(h: f64, gamma: f64) -> Self {
        let e = h.hypot(gamma);
        // (h + E, Γ) loses accuracy when h < 0 and |Γ| ≪ |h|; use the other form.
        let (x, y) = if h >= 0.0 { (h + e, gamma) } else { (gamma.abs(), (e - h) * gamma.signum()) };
        let n = x.hypot(y);
        if n == 0.0 {
            return Self::symmetric();
        }
        Self { a: Complex64::new(x / n, 0.0), b: Complex64::new(y / n, 0.0) }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn normalized(self) -> Self {
        let s = self.norm_sqr().sqrt().recip();
        Self { a: self.a * s, b: self.b * s }
    }

    /// `1 - |⟨g(h, Γ)|ψ⟩|²`: weight outside the instantaneous ground state.
    pub fn miss_probability(&self, h: f64, gamma: f64) -> f64 {
        let g = Self::ground_state(h, gamma);
        let ov = g.a.conj() * self.a + g.b.conj() * self.b;
        (1.0 - ov.norm_sqr() / self.norm_sqr()).max(0.0)
    }
}

/// Tolerances for [`solve_ode`].
#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Largest tolerated `| |a|² + |b|² - 1 |`.
    pub unitarity_tolerance: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, max_steps: 50_000_000, unitarity_tolerance: 1e-8 }
    }
}

/// Samples of the amplitudes along an ODE run.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    /// Requested sample times, then `t1`.
    pub points: Vec<(f64, AmplitudePair)>,
    pub steps: usize,
    pub rejected: usize,
}

impl OdeSolution {
    pub fn final_state(&self) -> AmplitudePair {
        self.points.last().expect("at least the end point").1
    }
}

/// Integrate from the instantaneous ground state of `H(t0)`.
pub fn solve_ode(schedule: &Schedule, h: f64, t0: f64, t1: f64, samples: &[f64], opts: &OdeOptions) -> Result<OdeSolution> {
    let start = AmplitudePair::ground_state(h, schedule.value(t0)?);
    solve_ode_from(schedule, h, t0, t1, start, samples, opts)
}

/// Integrate from a given state (normalised first).
pub fn solve_ode_from(
    schedule: &Schedule,
    h: f64,
    t0: f64,
    t1: f64,
    initial: AmplitudePair,
    samples: &[f64],
    opts: &OdeOptions,
) -> Result<OdeSolution> {
    schedule.value(t0)?;
    schedule.value(t1)?;
    if !(t1 >= t0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("need t1 >= t0 and finite h, got [{t0}, {t1}], h = {h}")));
    }
    if initial.norm_sqr() == 0.0 || !initial.norm_sqr().is_finite() {
        return Err(Error::InvalidParameter("initial amplitudes must be non-zero".into()));
    }
    let mut targets: Vec<f64> = Vec::with_capacity(samples.len() + 1);
    for &s in samples {
        if s < t0 || s > t1 || targets.last().is_some_and(|&l| s <= l) {
            return Err(Error::InvalidParameter(format!("sample {s} outside [{t0}, {t1}] or not increasing")));
        }
        targets.push(s);
    }
    let include_end = targets.last() != Some(&t1);
    if include_end {
        targets.push(t1);
    }
    let mut y = initial.normalized();
    let mut t = t0;
    let mut points = Vec::with_capacity(targets.len());
    let g0 = schedule.value_unchecked(t0).abs();
    let mut dt = 0.01 / (h.abs() + g0).max(1e-300);
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut k1 = rhs(schedule, h, t, &y);
    for &target in &targets {
        while t < target {
            if steps + rejected >= opts.max_steps {
                return Err(Error::Integration { t, reason: format!("step budget {} exhausted", opts.max_steps) });
            }
            let last = t + dt >= target;
            let step = if last { target - t } else { dt };
            let (y_new, k_new, err) = dopri_step(schedule, h, t, step, &y, &k1, opts);
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k_new;
                steps += 1;
            } else {
                rejected += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let proposed = step * factor;
            // Keep the long step when only the target shortened this one.
            dt = if last && err <= 1.0 { dt.max(proposed) } else { proposed };
            if !(dt > 0.0) || dt < 1e-14 * t.abs().max(1e-300) {
                return Err(Error::Integration { t, reason: format!("step size underflow (dt = {dt:e})") });
            }
        }
        let drift = (y.norm_sqr() - 1.0).abs();
        if drift > opts.unitarity_tolerance {
            return Err(Error::Integration { t, reason: format!("unitarity drift {drift:.3e}") });
        }
        points.push((target, y));
    }
    Ok(OdeSolution { points, steps, rejected })
}

fn rhs(schedule: &Schedule, h: f64, t: f64, y: &AmplitudePair) -> AmplitudePair {
    let g = schedule.value_unchecked(t);
    let i = Complex64::new(0.0, 1.0);
    AmplitudePair { a: i * (y.a * h + y.b * g), b: i * (y.a * g - y.b * h) }
}

fn combine(y: &AmplitudePair, dt: f64, ks: &[(&AmplitudePair, f64)]) -> AmplitudePair {
    let mut out = *y;
    for (k, w) in ks {
        out.a += k.a * (dt * w);
        out.b += k.b * (dt * w);
    }
    out
}

/// One Dormand-Prince step (FSAL); returns the new state, its derivative
/// and the scaled error norm.
fn dopri_step(
    s: &Schedule,
    h: f64,
    t: f64,
    dt: f64,
    y: &AmplitudePair,
    k1: &AmplitudePair,
    o: &OdeOptions,
) -> (AmplitudePair, AmplitudePair, f64) {
    let k2 = rhs(s, h, t + dt / 5.0, &combine(y, dt, &[(k1, 1.0 / 5.0)]));
    let k3 = rhs(s, h, t + 3.0 * dt / 10.0, &combine(y, dt, &[(k1, 3.0 / 40.0), (&k2, 9.0 / 40.0)]));
    let k4 = rhs(s, h, t + 4.0 * dt / 5.0, &combine(y, dt, &[(k1, 44.0 / 45.0), (&k2, -56.0 / 15.0), (&k3, 32.0 / 9.0)]));
    let k5 = rhs(
        s,
        h,
        t + 8.0 * dt / 9.0,
        &combine(y, dt, &[(k1, 19372.0 / 6561.0), (&k2, -25360.0 / 2187.0), (&k3, 64448.0 / 6561.0), (&k4, -212.0 / 729.0)]),
    );
    let k6 = rhs(
        s,
        h,
        t + dt,
        &combine(
            y,
            dt,
            &[(k1, 9017.0 / 3168.0), (&k2, -355.0 / 33.0), (&k3, 46732.0 / 5247.0), (&k4, 49.0 / 176.0), (&k5, -5103.0 / 18656.0)],
        ),
    );
    let y5 = combine(
        y,
        dt,
        &[(k1, 35.0 / 384.0), (&k3, 500.0 / 1113.0), (&k4, 125.0 / 192.0), (&k5, -2187.0 / 6784.0), (&k6, 11.0 / 84.0)],
    );
    let k7 = rhs(s, h, t + dt, &y5);
    let e = [
        (k1, 71.0 / 57600.0),
        (&k3, -71.0 / 16695.0),
        (&k4, 71.0 / 1920.0),
        (&k5, -17253.0 / 339200.0),
        (&k6, 22.0 / 525.0),
        (&k7, -1.0 / 40.0),
    ];
    let zero = AmplitudePair::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let err = combine(&zero, dt, &e);
    let scale = |old: Complex64, new: Complex64| o.atol + o.rtol * old.norm().max(new.norm());
    let ea = err.a.norm() / scale(y.a, y5.a);
    let eb = err.b.norm() / scale(y.b, y5.b);
    (y5, k7, ea.max(eb))
}
