//! Digamma and polygamma functions of complex argument.
//!
//! psi(z) = d/dz ln Gamma(z) and its derivatives psi^(n)(z) are evaluated by
//! upward recurrence into the region where the Bernoulli asymptotic series
//! converges to double precision, then summing that series:
//!
//!   psi(z)    ~ ln z - 1/(2z) - sum_k B_2k / (2k z^2k)
//!   psi^(n)(z) ~ (-1)^(n-1) [ (n-1)!/z^n + n!/(2 z^(n+1))
//!                 + sum_k B_2k (2k+n-1)! / ((2k)! z^(2k+n)) ]
//!
//! Non-positive integer arguments are poles and rejected.

use crate::{Error, Result};
use num_complex::Complex64;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577215664901532861;

/// B_2, B_4, ..., B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// |z| beyond which the asymptotic series is good to ~1e-18.
const ASYMPTOTIC_RADIUS: f64 = 16.0;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn pole_err(z: Complex64) -> Error {
    Error::PolygammaPole(format!("{z}"))
}

/// In the shifted region the series may be summed directly; keep away from
/// the negative real axis where the continuation is not represented.
fn in_asymptotic_region(z: Complex64) -> bool {
    z.norm() >= ASYMPTOTIC_RADIUS && (z.re >= 1.0 || z.im.abs() >= ASYMPTOTIC_RADIUS)
}

fn digamma_asymptotic(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut sum = z.ln() - 0.5 * inv;
    let mut zp = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        sum -= *b / (2.0 * (k as f64 + 1.0)) * zp;
        zp *= inv2;
    }
    sum
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).map(|k| k as f64).product()
}

fn polygamma_asymptotic(n: u32, z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let zmn = inv.powu(n);
    let mut sum = (factorial(n - 1) + 0.5 * factorial(n) * inv) * zmn;
    // B_2k (2k+n-1)!/(2k)! restated iteratively
    let mut zp = zmn * inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let tk = 2 * (k as u32 + 1);
        sum += *b * factorial(tk + n - 1) / factorial(tk) * zp;
        zp *= inv2;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sign * sum
}

/// Digamma function of complex argument.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidModel(format!("digamma argument {z} not finite")));
    }
    if is_pole(z) {
        return Err(pole_err(z));
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while !in_asymptotic_region(w) {
        if w.norm() == 0.0 {
            return Err(pole_err(z));
        }
        acc -= w.inv();
        w += 1.0;
    }
    Ok(acc + digamma_asymptotic(w))
}

/// n-th derivative of digamma, orders 1..=3.
pub fn polygamma(n: u32, z: Complex64) -> Result<Complex64> {
    if !(1..=3).contains(&n) {
        return Err(Error::PolygammaOrder(n));
    }
    polygamma_any(n, z)
}

/// Internal variant allowing orders up to 5 (needed by small-x series of the
/// saddle coefficients).
pub(crate) fn polygamma_any(n: u32, z: Complex64) -> Result<Complex64> {
    debug_assert!((1..=5).contains(&n));
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidModel(format!("polygamma argument {z} not finite")));
    }
    if is_pole(z) {
        return Err(pole_err(z));
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while !in_asymptotic_region(w) {
        if w.norm() == 0.0 {
            return Err(pole_err(z));
        }
        // psi^(n)(w) = psi^(n)(w+1) + (-1)^(n+1) n! / w^(n+1)
        acc += sign * factorial(n) * w.inv().powu(n + 1);
        w += 1.0;
    }
    Ok(acc + polygamma_asymptotic(n, w))
}

/// Harmonic number H(m) = psi(m+1) + gamma, continued to complex m.
pub fn harmonic_number(m: Complex64) -> Result<Complex64> {
    if m.im == 0.0 && m.re < 0.0 && m.re.fract() == 0.0 {
        return Err(Error::HarmonicPole(format!("{m}")));
    }
    Ok(digamma(m + 1.0)? + EULER_GAMMA)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_cplx(v: Complex64, re: f64, im: f64, tol: f64) {
        let scale = (re * re + im * im).sqrt().max(1e-30);
        assert!(
            (v - c(re, im)).norm() <= tol * scale,
            "got {v}, want {re}+{im}i (tol {tol})"
        );
    }

    #[test]
    fn digamma_reference_points() {
        assert_relative_eq!(
            digamma(c(1.0, 0.0)).unwrap().re,
            -EULER_GAMMA,
            max_relative = 1e-14
        );
        assert_eq!(digamma(c(1.0, 0.0)).unwrap().im, 0.0);
        assert_cplx(
            digamma(c(0.5, 0.3)).unwrap(),
            -1.3979326294058073,
            1.15666938332423782,
            1e-13,
        );
        assert_cplx(
            digamma(c(3.25, -7.5)).unwrap(),
            2.07747607196680104,
            -1.21892766742651602,
            1e-13,
        );
        assert_cplx(
            digamma(c(12.5, 40.0)).unwrap(),
            3.7319483552277125,
            1.27932637886296967,
            1e-13,
        );
    }

    #[test]
    fn digamma_rejects_poles() {
        for z in [c(0.0, 0.0), c(-1.0, 0.0), c(-7.0, 0.0)] {
            assert!(digamma(z).is_err(), "expected pole at {z}");
        }
        assert!(digamma(c(-0.5, 0.0)).is_ok());
    }

    #[test]
    fn trigamma_reference_points() {
        assert_relative_eq!(
            polygamma(1, c(1.0, 0.0)).unwrap().re,
            std::f64::consts::PI.powi(2) / 6.0,
            max_relative = 1e-14
        );
        // Re psi'(1/2 + 5i) = pi^2 / (2 cosh^2(5 pi)) ~ 4.5e-13; the value is
        // produced by cancellation of O(0.1) terms, so only absolute accuracy
        // near machine epsilon of those terms is meaningful here.
        let v = polygamma(1, c(0.5, 5.0)).unwrap();
        assert!((v.re - 4.48297381984984051e-13).abs() < 1e-15);
        assert_relative_eq!(v.im, -0.20067631397992514, max_relative = 1e-13);
        assert_cplx(
            polygamma(1, c(2.75, 0.25)).unwrap(),
            0.432606253726355692,
            -0.046656751978554514,
            1e-13,
        );
    }

    #[test]
    fn higher_order_reference_points() {
        assert_relative_eq!(
            polygamma(2, c(1.0, 0.0)).unwrap().re,
            -2.40411380631918857,
            max_relative = 1e-13
        );
        assert_cplx(
            polygamma(2, c(0.5, 1.25)).unwrap(),
            0.794222226490773511,
            0.0480722458625722997,
            1e-13,
        );
        assert_cplx(
            polygamma(2, c(3.0, 1.0)).unwrap(),
            -0.0994470684120648283,
            0.0906528503450662124,
            1e-13,
        );
        assert_relative_eq!(
            polygamma(3, c(1.0, 0.0)).unwrap().re,
            6.49393940226682915,
            max_relative = 1e-13
        );
        assert_cplx(
            polygamma(3, c(4.5, 3.0)).unwrap(),
            -0.00531577082479735643,
            -0.0149896585186515278,
            1e-12,
        );
        assert_cplx(
            polygamma(3, c(0.75, -0.5)).unwrap(),
            -6.0355811940412261,
            7.03212060731784994,
            1e-13,
        );
    }

    #[test]
    fn internal_fifth_order() {
        // psi^(5)(1) = 5! * zeta(6) > 0 (the sign alternates with order: odd
        // orders are positive on the positive real axis).
        assert_relative_eq!(
            polygamma_any(5, c(1.0, 0.0)).unwrap().re,
            120.0 * 1.01734306198444914,
            max_relative = 1e-13
        );
        assert_cplx(
            polygamma_any(5, c(0.5, 2.0)).unwrap(),
            0.10727421189793209,
            -1.15422318427524625,
            1e-12,
        );
    }

    #[test]
    fn polygamma_order_validation() {
        assert!(polygamma(0, c(2.0, 0.0)).is_err());
        assert!(polygamma(4, c(2.0, 0.0)).is_err());
    }

    #[test]
    fn harmonic_reference_points() {
        let h3 = harmonic_number(c(3.0, 0.0)).unwrap();
        assert_relative_eq!(h3.re, 11.0 / 6.0, max_relative = 1e-14);
        let h0 = harmonic_number(c(0.0, 0.0)).unwrap();
        assert!(h0.norm() < 1e-14);
        let hh = harmonic_number(c(0.5, 0.0)).unwrap();
        assert_relative_eq!(hh.re, 2.0 - 2.0 * std::f64::consts::LN_2, max_relative = 1e-14);
        assert_cplx(
            harmonic_number(c(2.5, -1.5)).unwrap(),
            1.78963576536851362,
            -0.460738900672417257,
            1e-13,
        );
        assert!(harmonic_number(c(-1.0, 0.0)).is_err());
        assert!(harmonic_number(c(-2.0, 0.0)).is_err());
    }

    proptest! {
        // psi(z+1) - psi(z) = 1/z
        #[test]
        fn digamma_recurrence(re in -5.0f64..20.0, im in 0.01f64..30.0) {
            let z = c(re, im);
            let lhs = digamma(z + 1.0).unwrap() - digamma(z).unwrap();
            prop_assert!((lhs - z.inv()).norm() < 1e-11 * z.inv().norm().max(1.0));
        }

        // psi^(n)(conj z) = conj psi^(n)(z)
        #[test]
        fn conjugate_symmetry(re in 0.1f64..15.0, im in -10.0f64..10.0, n in 1u32..=3) {
            let z = c(re, im);
            let a = polygamma(n, z.conj()).unwrap();
            let b = polygamma(n, z).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-12));
        }

        // d/dz recurrence for trigamma: psi'(z+1) = psi'(z) - 1/z^2
        #[test]
        fn trigamma_recurrence(re in -3.0f64..12.0, im in 0.05f64..12.0) {
            let z = c(re, im);
            let lhs = polygamma(1, z + 1.0).unwrap();
            let rhs = polygamma(1, z).unwrap() - z.inv() * z.inv();
            prop_assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0));
        }
    }
}
