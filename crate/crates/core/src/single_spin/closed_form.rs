use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::special::{gamma, hyp1f1, rgamma};
use super::AmplitudePair;
use crate::error::{Error, Result};

/// Longitudinal field `h` and schedule coefficient `c` of a single spin
/// under `H = -hσ^z - Γ(t)σ^x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleSpinParams {
    pub h: f64,
    pub c: f64,
}

impl SingleSpinParams {
    pub fn new(h: f64, c: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite() && c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("h and c must be positive, got h = {h}, c = {c}")));
        }
        Ok(Self { h, c })
    }

    /// `γ = c²/2h`.
    pub fn gamma(&self) -> f64 {
        self.c * self.c / (2.0 * self.h)
    }
}

/// A limiting formula and whether the parameters sit in the regime where
/// it was derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEstimate {
    pub value: f64,
    pub in_regime: bool,
}

const REGIME_RATIO: f64 = 10.0;

fn ci(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Landau-Zener (`Γ = -ct`, `t: -∞ → 0`) miss probability `c²/16h⁴`,
/// derived for `h²/c ≫ 1`.
pub fn lz_final_miss_probability(p: SingleSpinParams) -> AsymptoticEstimate {
    AsymptoticEstimate { value: p.c * p.c / (16.0 * p.h.powi(4)), in_regime: p.h * p.h / p.c >= REGIME_RATIO }
}

/// `b(0)` of the Landau-Zener solution, valid for all `h, c`.
pub fn lz_amplitude_b0(p: SingleSpinParams) -> Complex64 {
    let (h, c) = (p.h, p.c);
    let x = h * h / (4.0 * c);
    let pre = -h * PI.sqrt() * (ci(0.0, -x) * 2f64.ln()).exp() * (-PI * h * h / (8.0 * c)).exp() / (2.0 * (2.0 * c).sqrt());
    let rot = ci(0.0, 0.75 * PI).exp();
    pre * (rgamma(ci(1.0, x)) + c.sqrt() * rot * ci(1.0, h * h / (2.0 * c)) * rgamma(ci(1.5, x)) / h)
}

/// `|b(0)|²` of the Landau-Zener solution.
pub fn lz_exact_final_miss_probability(p: SingleSpinParams) -> f64 {
    lz_amplitude_b0(p).norm_sqr()
}

/// `t → ∞` miss probability for `Γ = c/t`:
/// `sinh(πc) e^{-πc} / sinh(2πc) = e^{-2πc} / (1 + e^{-2πc})`.
pub fn inverse_time_final_miss_probability(c: f64) -> f64 {
    let x = (-2.0 * PI * c).exp();
    x / (1.0 + x)
}

/// The `c ≫ 1` form `e^{-2πc}`.
pub fn inverse_time_miss_approx(c: f64) -> f64 {
    (-2.0 * PI * c).exp()
}

/// `Γ = c/√t` miss probability `h²/64c⁴`, derived for `c²/h ≫ 1`.
pub fn inverse_sqrt_final_miss_probability(p: SingleSpinParams) -> AsymptoticEstimate {
    AsymptoticEstimate { value: p.h * p.h / (64.0 * p.c.powi(4)), in_regime: p.c * p.c / p.h >= REGIME_RATIO }
}

/// `|b(∞)|² = (π e^{-γπ}/2) |1/Γ(½-iγ) + γ^{-½} e^{5πi/4} / Γ(-iγ)|²`, the
/// exact limit for `Γ = c/√t` from `a = b = 1/√2`.
pub fn inverse_sqrt_exact_final_miss_probability(p: SingleSpinParams) -> f64 {
    let g = p.gamma();
    let bracket = rgamma(ci(0.5, -g)) + g.powf(-0.5) * ci(0.0, 1.25 * PI).exp() * rgamma(ci(0.0, -g));
    0.5 * PI * (-g * PI).exp() * bracket.norm_sqr()
}

/// `b(t)` for `Γ = c/t` from `a = b = 1/√2` at `t = 0`:
/// `(1/√2) e^{iht} t^{ic} F(1+ic, 1+2ic; -2iht)`.
pub fn amplitude_b_inverse_time(p: SingleSpinParams, t: f64) -> Result<Complex64> {
    Ok(amplitudes_inverse_time(p, t)?.b)
}

/// Both amplitudes for `Γ = c/t`; `a` follows from `a = (hb - iḃ)/Γ`.
pub fn amplitudes_inverse_time(p: SingleSpinParams, t: f64) -> Result<AmplitudePair> {
    check_time(t)?;
    let (h, c) = (p.h, p.c);
    let i = ci(0.0, 1.0);
    let (alpha, beta) = (ci(1.0, c), ci(1.0, 2.0 * c));
    let z = ci(0.0, -2.0 * h * t);
    let pre = FRAC_1_SQRT_2 * (i * (h * t + c * t.ln())).exp();
    let f = hyp1f1(alpha, beta, z)?.value;
    let df = alpha / beta * hyp1f1(alpha + 1.0, beta + 1.0, z)?.value;
    let b = pre * f;
    let db = b * (i * h + i * c / t) + pre * df * ci(0.0, -2.0 * h);
    let a = (h * b - i * db) * (t / c);
    Ok(AmplitudePair { a, b })
}

/// `b(t)` for `Γ = c/√t` from `a = b = 1/√2` at `t = 0`.
pub fn amplitude_b_inverse_sqrt(p: SingleSpinParams, t: f64) -> Result<Complex64> {
    Ok(amplitudes_inverse_sqrt(p, t)?.b)
}

/// Both amplitudes for `Γ = c/√t` from `a = b = 1/√2`.
pub fn amplitudes_inverse_sqrt(p: SingleSpinParams, t: f64) -> Result<AmplitudePair> {
    let c2 = p.c / p.h.sqrt() * ci(0.0, 0.75 * PI).exp();
    inverse_sqrt_solution(p, ci(FRAC_1_SQRT_2, 0.0), c2, t)
}

/// `b(t) = e^{iht}[C₁ F(½-iγ, ½; z) + C₂ z^{½} F(1-iγ, 3/2; z)]` with
/// `z = -2iht`, and `a` from `a = (hb - iḃ)/Γ`.
pub(crate) fn inverse_sqrt_solution(p: SingleSpinParams, c1: Complex64, c2: Complex64, t: f64) -> Result<AmplitudePair> {
    check_time(t)?;
    let (h, c, g) = (p.h, p.c, p.gamma());
    let i = ci(0.0, 1.0);
    let z = ci(0.0, -2.0 * h * t);
    let dz = ci(0.0, -2.0 * h);
    let (a1, b1) = (ci(0.5, -g), ci(0.5, 0.0));
    let (a2, b2) = (ci(1.0, -g), ci(1.5, 0.0));
    let f1 = hyp1f1(a1, b1, z)?.value;
    let df1 = a1 / b1 * hyp1f1(a1 + 1.0, b1 + 1.0, z)?.value;
    let f2 = hyp1f1(a2, b2, z)?.value;
    let df2 = a2 / b2 * hyp1f1(a2 + 1.0, b2 + 1.0, z)?.value;
    let sz = z.sqrt();
    let phase = (i * h * t).exp();
    let inner = c1 * f1 + c2 * sz * f2;
    let d_inner = c1 * df1 * dz + c2 * (0.5 / sz * dz * f2 + sz * df2 * dz);
    let b = phase * inner;
    let db = i * h * b + phase * d_inner;
    let a = (h * b - i * db) * (t.sqrt() / c);
    Ok(AmplitudePair { a, b })
}

/// Leading large-`t` form of `b(t)` for `Γ = c/t`.
pub fn asymptotic_b_inverse_time(p: SingleSpinParams, t: f64) -> Result<Complex64> {
    check_time(t)?;
    let (h, c) = (p.h, p.c);
    let i = ci(0.0, 1.0);
    let pre = 2f64.sqrt() * (-i * c * (2.0 * h).ln()).exp() * gamma(ci(0.0, 2.0 * c))? * rgamma(ci(0.0, c));
    Ok(pre * ((-i * h * t).exp() * (-PI * c / 2.0).exp() + c * (i * h * t).exp() * (PI * c / 2.0).exp() / (2.0 * h * t)))
}

/// Leading large-`t` form of `b(t)` for `Γ = c/√t`, standard start.
pub fn asymptotic_b_inverse_sqrt(p: SingleSpinParams, t: f64) -> Result<Complex64> {
    check_time(t)?;
    let (h, c, g) = (p.h, p.c, p.gamma());
    let i = ci(0.0, 1.0);
    let l = (2.0 * h * t).ln();
    let first = (-i * h * t - i * g * l).exp()
        * (FRAC_1_SQRT_2 * rgamma(ci(0.5, -g)) + h.sqrt() * ci(0.0, 1.25 * PI).exp() * rgamma(ci(0.0, -g)) / c);
    let second = (i * h * t + (ci(-0.5, g)) * l).exp()
        * (ci(0.0, -0.25 * PI).exp() * FRAC_1_SQRT_2 * rgamma(ci(0.0, g)) + c / (2.0 * h.sqrt()) * rgamma(ci(0.5, g)));
    Ok(PI.sqrt() * (-PI * c * c / (4.0 * h)).exp() * (first + second))
}

/// Initial amplitudes for `Γ = c/√t` that make `b(∞) = 0`:
/// `b(0) = C₁`, `a(0) = √h/(√2 c) e^{5πi/4} C₂` with
/// `C₁ = {1 + sinh(πc²/h) / (2 sinh²(πc²/2h))}^{-½}` and
/// `C₂ = i c² Γ(-iγ) / (h Γ(½-iγ)) C₁`.
pub fn tuned_initial_condition(p: SingleSpinParams) -> AmplitudePair {
    let (c1, c2) = tuned_coefficients(p);
    let a = p.h.sqrt() / (2f64.sqrt() * p.c) * ci(0.0, 1.25 * PI).exp() * c2;
    AmplitudePair { a, b: c1 }.normalized()
}

fn tuned_coefficients(p: SingleSpinParams) -> (Complex64, Complex64) {
    let (h, c, g) = (p.h, p.c, p.gamma());
    let x = PI * c * c / h;
    // sinh(x) / (2 sinh²(x/2)) = coth(x/2)
    let c1 = (1.0 + 1.0 / (x / 2.0).tanh()).powf(-0.5);
    let ratio = gamma(ci(0.0, -g)).expect("γ > 0") * rgamma(ci(0.5, -g));
    (ci(c1, 0.0), ci(0.0, c * c / h) * ratio * c1)
}

/// Amplitudes at time `t` from the tuned start (closed form).
pub fn amplitudes_inverse_sqrt_tuned(p: SingleSpinParams, t: f64) -> Result<AmplitudePair> {
    let (c1, c2) = tuned_coefficients(p);
    inverse_sqrt_solution(p, c1, c2, t)
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("closed forms need t > 0, got {t}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single_spin::{solve_ode_from, OdeOptions};
    use crate::Schedule;

    fn pp(h: f64, c: f64) -> SingleSpinParams {
        SingleSpinParams::new(h, c).unwrap()
    }

    #[test]
    fn limiting_formula_values() {
        assert!((lz_final_miss_probability(pp(1.0, 0.05)).value - 1.5625e-4).abs() < 1e-18);
        assert!(lz_final_miss_probability(pp(1.0, 0.05)).in_regime);
        assert!((inverse_sqrt_final_miss_probability(pp(0.1, 1.0)).value - 1.5625e-4).abs() < 1e-18);
        assert!(!inverse_sqrt_final_miss_probability(pp(1.0, 1.0)).in_regime);
        assert!(SingleSpinParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn inverse_time_limit_identity() {
        for c in [0.1, 0.5, 1.0, 2.0, 3.0] {
            let sinh_form = (PI * c).sinh() * (-PI * c).exp() / (2.0 * PI * c).sinh();
            assert!((inverse_time_final_miss_probability(c) - sinh_form).abs() < 1e-15);
        }
        let c = 2.0;
        let rel = (inverse_time_miss_approx(c) / inverse_time_final_miss_probability(c) - 1.0).abs();
        assert!(rel < 1e-5);
        let mut prev = 1.0;
        for k in 1..40 {
            let v = inverse_time_final_miss_probability(0.1 * k as f64);
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn exact_sqrt_limit_approaches_leading_form() {
        for (h, c) in [(0.1, 1.0), (1.0, 4.0)] {
            let p = pp(h, c);
            let exact = inverse_sqrt_exact_final_miss_probability(p);
            let lead = inverse_sqrt_final_miss_probability(p).value;
            assert!((exact / lead - 1.0).abs() < 0.01, "{exact} vs {lead}");
        }
    }

    #[test]
    fn tuned_start_is_normalised_and_distinct() {
        for (h, c) in [(1.0, 1.5), (0.5, 1.0), (0.3, 0.4)] {
            let s = tuned_initial_condition(pp(h, c));
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            let sym = AmplitudePair::symmetric();
            assert!((s.a - sym.a).norm() + (s.b - sym.b).norm() > 1e-2);
            // Normalisation is built into C₁ already.
            let (c1, c2) = tuned_coefficients(pp(h, c));
            let a = h.sqrt() / (2f64.sqrt() * c) * c2.norm();
            assert!((c1.norm_sqr() + a * a - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_are_unitary() {
        let p = pp(1.0, 1.0);
        for t in [1e-3, 0.5, 3.0, 25.0, 400.0] {
            let s = amplitudes_inverse_time(p, t).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-9, "c/t at {t}: {}", s.norm_sqr());
            let s = amplitudes_inverse_sqrt(p, t).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-9, "c/√t at {t}: {}", s.norm_sqr());
        }
    }

    #[test]
    fn small_time_limit() {
        let p = pp(1.0, 0.8);
        assert!((amplitude_b_inverse_time(p, 1e-9).unwrap().norm() - FRAC_1_SQRT_2).abs() < 1e-6);
        assert!((amplitude_b_inverse_sqrt(p, 1e-12).unwrap().norm() - FRAC_1_SQRT_2).abs() < 1e-5);
    }

    #[test]
    fn closed_forms_match_ode_up_to_ht_10() {
        let opts = OdeOptions::default();
        for h in [0.1, 1.0] {
            for c in [0.5, 1.0, 2.0] {
                let p = pp(h, c);
                let t_end = 10.0 / h;
                let samples = [0.1 / h, 1.0 / h, 5.0 / h];
                // c/t: start at t0 on the closed-form trajectory's leading term.
                let t0 = 1e-9 / h;
                let start = AmplitudePair::new(
                    Complex64::from_polar(FRAC_1_SQRT_2, c * t0.ln()),
                    Complex64::from_polar(FRAC_1_SQRT_2, c * t0.ln()),
                );
                let sched = Schedule::inverse(c).unwrap().with_t_start(t0).unwrap();
                let sol = solve_ode_from(&sched, h, t0, t_end, start, &samples, &opts).unwrap();
                for &(t, s) in &sol.points {
                    let b = amplitude_b_inverse_time(p, t).unwrap();
                    assert!((b - s.b).norm() < 1e-4, "c/t h={h} c={c} t={t}: {b} vs {}", s.b);
                }
                // c/√t from a = b = 1/√2.
                let t0 = 1e-12;
                let sched = Schedule::inverse_sqrt(c).unwrap().with_t_start(t0).unwrap();
                let sol = solve_ode_from(&sched, h, t0, t_end, AmplitudePair::symmetric(), &samples, &opts).unwrap();
                for &(t, s) in &sol.points {
                    let b = amplitude_b_inverse_sqrt(p, t).unwrap();
                    assert!((b - s.b).norm() < 1e-4, "c/√t h={h} c={c} t={t}: {b} vs {}", s.b);
                }
            }
        }
    }

    #[test]
    fn asymptotic_forms_approached() {
        let p = pp(1.0, 1.0);
        for t in [1e3, 1e4] {
            let b = amplitude_b_inverse_sqrt(p, t).unwrap().norm();
            let asy = asymptotic_b_inverse_sqrt(p, t).unwrap().norm();
            assert!((b / asy - 1.0).abs() < 0.05, "c/√t t={t}: {b} vs {asy}");
            let b = amplitude_b_inverse_time(p, t).unwrap().norm();
            let asy = asymptotic_b_inverse_time(p, t).unwrap().norm();
            assert!((b / asy - 1.0).abs() < 0.05, "c/t t={t}: {b} vs {asy}");
        }
    }

    #[test]
    fn lz_exact_agrees_with_leading_form_in_regime() {
        let p = pp(1.0, 0.05);
        let exact = lz_exact_final_miss_probability(p);
        assert!((exact / lz_final_miss_probability(p).value - 1.0).abs() < 0.02);
    }
}
