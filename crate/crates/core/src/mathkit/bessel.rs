//! Bessel function J0, used by the spatially correlated coupling kernel in
//! two dimensions.

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_points() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert_relative_eq!(bessel_j0(1.0), 0.765197686557966551, max_relative = 1e-14);
        assert_relative_eq!(bessel_j0(5.2), -0.11029043979098654, max_relative = 1e-13);
        // first zero
        assert!(bessel_j0(2.40482555769577277).abs() < 1e-14);
    }

    /// Independent check against the ascending series
    /// J0(x) = sum_k (-1)^k (x^2/4)^k / (k!)^2, accurate for small |x|.
    fn j0_series(x: f64) -> f64 {
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= -q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        sum
    }

    proptest! {
        #[test]
        fn matches_series_at_small_argument(x in 0.0f64..6.0) {
            prop_assert!((bessel_j0(x) - j0_series(x)).abs() < 1e-12);
        }

        #[test]
        fn even_function(x in 0.0f64..50.0) {
            prop_assert_eq!(bessel_j0(x), bessel_j0(-x));
        }

        #[test]
        fn bounded_by_one(x in -100.0f64..100.0) {
            prop_assert!(bessel_j0(x).abs() <= 1.0 + 1e-15);
        }
    }
}
