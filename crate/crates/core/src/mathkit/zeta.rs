//! Hurwitz zeta function for real s > 1, a > 0, via Euler-Maclaurin:
//!
//!   zeta(s,a) = sum_{k<N} (a+k)^-s + (N+a)^(1-s)/(s-1) + (N+a)^-s / 2
//!             + sum_j B_2j/(2j)! * s(s+1)...(s+2j-2) * (N+a)^(-s-2j+1)
//!
//! with N chosen so the correction series is far below double precision.

use crate::{Error, Result};

/// B_2j / (2j)! for j = 1..=6.
const EM_COEFF: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -1.6125538671904328e-10,
];

/// Hurwitz zeta function zeta(s, a) for s > 1, a > 0.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if !(s > 1.0) || !(a > 0.0) || !s.is_finite() || !a.is_finite() {
        return Err(Error::HurwitzDomain { s, a });
    }
    let n = (15.0 - a).ceil().max(0.0) as usize;
    let mut sum = 0.0;
    for k in 0..n {
        sum += (a + k as f64).powf(-s);
    }
    let w = a + n as f64;
    sum += w.powf(1.0 - s) / (s - 1.0) + 0.5 * w.powf(-s);
    let w2 = w * w;
    let mut poch = s; // s(s+1)...(s+2j-2), starting at j = 1
    let mut wp = w.powf(-s - 1.0);
    for (j, cj) in EM_COEFF.iter().enumerate() {
        sum += cj * poch * wp;
        let tj = 2.0 * (j as f64 + 1.0);
        poch *= (s + tj - 1.0) * (s + tj);
        wp /= w2;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_points() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert_relative_eq!(hurwitz_zeta(2.0, 1.0).unwrap(), pi2_6, max_relative = 1e-14);
        assert_relative_eq!(hurwitz_zeta(2.0, 2.0).unwrap(), pi2_6 - 1.0, max_relative = 1e-13);
        assert_relative_eq!(
            hurwitz_zeta(2.0, 0.5).unwrap(),
            std::f64::consts::PI.powi(2) / 2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            hurwitz_zeta(3.5, 2.25).unwrap(),
            0.0890122424923888511,
            max_relative = 1e-13
        );
    }

    #[test]
    fn domain_checks() {
        assert!(hurwitz_zeta(1.0, 1.0).is_err());
        assert!(hurwitz_zeta(0.5, 1.0).is_err());
        assert!(hurwitz_zeta(2.0, 0.0).is_err());
        assert!(hurwitz_zeta(2.0, -1.0).is_err());
        assert!(hurwitz_zeta(f64::NAN, 1.0).is_err());
    }

    proptest! {
        // zeta(s,a) = zeta(s,a+1) + a^-s
        #[test]
        fn shift_identity(s in 1.5f64..6.0, a in 0.1f64..5.0) {
            let lhs = hurwitz_zeta(s, a).unwrap();
            let rhs = hurwitz_zeta(s, a + 1.0).unwrap() + a.powf(-s);
            prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        }

        #[test]
        fn decreasing_in_a(s in 1.5f64..5.0, a in 0.2f64..10.0) {
            let v0 = hurwitz_zeta(s, a).unwrap();
            let v1 = hurwitz_zeta(s, a + 0.5).unwrap();
            prop_assert!(v1 < v0);
        }
    }
}
