//! Complex Gamma and the confluent hypergeometric function `F(a, b; z)`.
//!
//! The power series for `F` at purely imaginary `z` cancels badly: at
//! `|z| = 40` the largest term is about `10^16` while the sum is of order
//! one. Terms are therefore accumulated in double-double arithmetic.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `|z|` summed by the power series; [`hyp1f1`] switches to the
/// large-`|z|` expansion beyond it.
pub const SERIES_RADIUS: f64 = 40.0;

const MAX_TERMS: usize = 20_000;

/// A series value with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub error: f64,
}

/// `F(a, b; z)`, by power series for `|z| ≤ 40` and asymptotic expansion
/// beyond.
pub fn hyp1f1(a: Complex64, b: Complex64, z: Complex64) -> Result<SeriesValue> {
    if z.norm() <= SERIES_RADIUS {
        hyp1f1_series(a, b, z)
    } else {
        hyp1f1_asymptotic(a, b, z)
    }
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Power series `Σ (a)_k z^k / ((b)_k k!)` in double-double precision.
/// For `Re z < 0` Kummer's relation `F(a, b; z) = e^z F(b-a, b; -z)` is
/// applied first, so the summed terms do not alternate in sign.
pub fn hyp1f1_series(a: Complex64, b: Complex64, z: Complex64) -> Result<SeriesValue> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain(format!("F(a, b; z) undefined for b = {b}")));
    }
    if z.re < 0.0 {
        let inner = raw_series(b - a, b, -z)?;
        let e = z.exp();
        return Ok(SeriesValue { value: e * inner.value, error: e.norm() * inner.error });
    }
    raw_series(a, b, z)
}

fn raw_series(a: Complex64, b: Complex64, z: Complex64) -> Result<SeriesValue> {
    let mut term = Cdd::from(Complex64::new(1.0, 0.0));
    let mut sum = term;
    let mut max_term: f64 = 1.0;
    let zd = Cdd::from(z);
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let num = Cdd::from(a).add_f64(kf).mul(zd);
        let den = Cdd::from(b).add_f64(kf).mul_f64(kf + 1.0);
        term = term.mul(num).div(den);
        sum = sum.add(term);
        let t = term.norm();
        max_term = max_term.max(t);
        let s = sum.norm();
        // Terms shrink for good once k exceeds |z| and |a|.
        let tail_regime = kf + 1.0 > z.norm() + a.norm();
        if t == 0.0 || (tail_regime && t <= 1e-18 * s.max(f64::MIN_POSITIVE)) {
            let rounding = max_term * (k as f64 + 2.0) * 1e-31;
            return Ok(SeriesValue { value: sum.to_c64(), error: rounding + t + 1e-16 * s });
        }
    }
    Err(Error::SeriesNonConvergence { terms: MAX_TERMS, partial: sum.to_c64() })
}

/// Large-`|z|` expansion (Kummer's two asymptotic series, each truncated
/// at its smallest term).
pub fn hyp1f1_asymptotic(a: Complex64, b: Complex64, z: Complex64) -> Result<SeriesValue> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain(format!("F(a, b; z) undefined for b = {b}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let lnz = z.ln();
    let gb = gamma(b)?;
    let (s1, e1) = asymptotic_sum(a, a - b + one, -z);
    let (s2, e2) = asymptotic_sum(b - a, one - a, z);
    let p1 = (i * PI * a * sign - a * lnz).exp() * rgamma(b - a);
    let p2 = (z + (a - b) * lnz).exp() * rgamma(a);
    let value = gb * (p1 * s1 + p2 * s2);
    let error = gb.norm() * (p1.norm() * e1 + p2.norm() * e2) + 1e-15 * value.norm();
    Ok(SeriesValue { value, error })
}

/// `Σ_s (p)_s (q)_s / s! · w^{-s}`, truncated where terms stop shrinking.
fn asymptotic_sum(p: Complex64, q: Complex64, w: Complex64) -> (Complex64, f64) {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = 1.0;
    for s in 0..200 {
        let sf = s as f64;
        let next = term * (p + sf) * (q + sf) / ((sf + 1.0) * w);
        let n = next.norm();
        if n >= last {
            break;
        }
        term = next;
        sum += term;
        last = n;
        if n <= 1e-17 * sum.norm() {
            break;
        }
    }
    (sum, last)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Complex Gamma function (Lanczos approximation with reflection for
/// `Re z < 1/2`).
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Domain(format!("Gamma has a pole at {z}")));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        return pi / ((pi * z).sin() * gamma_unchecked(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * (t.ln() * (z + 0.5) - t).exp() * x
}

/// `1/Γ(z)`, zero at the poles.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        Complex64::new(0.0, 0.0)
    } else {
        1.0 / gamma_unchecked(z)
    }
}

/// Double-double real: `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::new(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::new(q2)));
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::new(q3))
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Double-double complex.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl From<Complex64> for Cdd {
    fn from(z: Complex64) -> Self {
        Cdd { re: Dd::new(z.re), im: Dd::new(z.im) }
    }
}

impl Cdd {
    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn add_f64(self, x: f64) -> Cdd {
        Cdd { re: self.re.add(Dd::new(x)), im: self.im }
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.mul(o.re).sub(self.im.mul(o.im)), im: self.re.mul(o.im).add(self.im.mul(o.re)) }
    }

    fn mul_f64(self, x: f64) -> Cdd {
        let x = Dd::new(x);
        Cdd { re: self.re.mul(x), im: self.im.mul(x) }
    }

    fn div(self, o: Cdd) -> Cdd {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let conj = Cdd { re: o.re, im: o.im.neg() };
        let n = self.mul(conj);
        Cdd { re: n.re.div(den), im: n.im.div(den) }
    }

    fn norm(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn gamma_known_values() {
        assert!(rel(gamma(c(1.0, 0.0)).unwrap(), c(1.0, 0.0)) < 1e-14);
        assert!(rel(gamma(c(0.5, 0.0)).unwrap(), c(PI.sqrt(), 0.0)) < 1e-14);
        assert!(rel(gamma(c(5.0, 0.0)).unwrap(), c(24.0, 0.0)) < 1e-13);
        let gi = gamma(c(0.0, 1.0)).unwrap().norm_sqr();
        assert!((gi - PI / PI.sinh()).abs() / gi < 1e-13);
        assert!(gamma(c(-2.0, 0.0)).is_err());
        assert_eq!(rgamma(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn gamma_half_line_modulus() {
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        for y in [0.3, 2.0, 7.5, 20.0] {
            let g = gamma(c(0.5, y)).unwrap().norm_sqr();
            let want = PI / (PI * y).cosh();
            assert!((g - want).abs() / want < 1e-11, "y={y}");
        }
    }

    proptest! {
        #[test]
        fn gamma_recurrence(re in -6.0f64..8.0, im in -10.0f64..10.0) {
            let z = c(re, im);
            prop_assume!((z - z.re.round()).norm() > 1e-3);
            let ratio = gamma(z + 1.0).unwrap() / gamma(z).unwrap();
            prop_assert!(rel(ratio, z) < 1e-10);
        }

        #[test]
        fn series_matches_compensated_oracle(ar in -3.0f64..3.0, ai in -3.0f64..3.0, br in 0.2f64..4.0, bi in -3.0f64..3.0, zr in -3.5f64..3.5, zi in -3.5f64..3.5) {
            let (a, b, z) = (c(ar, ai), c(br, bi), c(zr, zi));
            let got = hyp1f1_series(a, b, z).unwrap().value;
            let want = kahan_series(a, b, z);
            prop_assert!((got - want).norm() <= 1e-12 * want.norm().max(1e-3));
        }
    }

    /// Independent oracle: plain f64 terms, sum accumulated with Neumaier
    /// compensation. Adequate for `|z| ≤ 5`, where cancellation is mild.
    fn kahan_series(a: Complex64, b: Complex64, z: Complex64) -> Complex64 {
        let mut term = c(1.0, 0.0);
        let (mut sum, mut comp) = (term, c(0.0, 0.0));
        for k in 0..400 {
            let kf = k as f64;
            term = term * (a + kf) * z / ((b + kf) * (kf + 1.0));
            let t = sum + term;
            let fix = |s: f64, x: f64, t: f64| if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
            comp += c(fix(sum.re, term.re, t.re), fix(sum.im, term.im, t.im));
            sum = t;
        }
        sum + comp
    }

    #[test]
    fn identities() {
        let z = c(0.0, 0.0);
        assert_eq!(hyp1f1(c(0.3, 1.0), c(2.0, -1.0), z).unwrap().value, c(1.0, 0.0));
        for z in [c(1.5, -0.5), c(0.0, -20.0), c(0.0, 39.0), c(-30.0, 5.0)] {
            let f = hyp1f1(c(1.0, 0.0), c(1.0, 0.0), z).unwrap();
            assert!(rel(f.value, z.exp()) < 1e-13, "z={z}");
        }
    }

    #[test]
    fn cancellation_at_series_radius() {
        // F(1, 2; z) = (e^z - 1)/z: the series sums 1e16-sized terms to O(1/40).
        let z = c(0.0, -40.0);
        let f = hyp1f1_series(c(1.0, 0.0), c(2.0, 0.0), z).unwrap();
        let want = (z.exp() - 1.0) / z;
        assert!((f.value - want).norm() < 1e-14, "{} vs {}", f.value, want);
        assert!(f.error < 1e-13);
    }

    #[test]
    fn kummer_transformation_on_imaginary_axis() {
        // F(a, b; z) = e^z F(b - a, b; -z)
        let (a, b) = (c(1.0, 1.3), c(1.0, 2.6));
        for zi in [-5.0, -17.0, -39.0] {
            let z = c(0.0, zi);
            let lhs = hyp1f1(a, b, z).unwrap().value;
            let rhs = z.exp() * hyp1f1(b - a, b, -z).unwrap().value;
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0), "z={z}");
        }
    }

    #[test]
    fn asymptotic_joins_series() {
        for (a, b) in [(c(1.0, 1.0), c(1.0, 2.0)), (c(0.5, -2.0), c(0.5, 0.0)), (c(1.0, -2.0), c(1.5, 0.0))] {
            let z = c(0.0, -SERIES_RADIUS);
            let s = hyp1f1_series(a, b, z).unwrap().value;
            let asy = hyp1f1_asymptotic(a, b, z).unwrap().value;
            assert!((s - asy).norm() <= 1e-10 * s.norm().max(1e-3), "a={a} b={b}: {s} vs {asy}");
        }
    }

    #[test]
    fn pole_in_b_is_rejected() {
        assert!(hyp1f1(c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)).is_err());
    }
}
