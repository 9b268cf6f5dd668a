//! Direct eigendecomposition of a real 3x3 matrix.
//!
//! The Bloch generator is a real 3x3 matrix whose spectrum is either three
//! real eigenvalues or one real plus a conjugate pair. Both cases are
//! reached through the characteristic cubic: the roots are seeded by the
//! closed-form solution (Cardano / trigonometric) and polished with a few
//! complex Newton steps, after which eigenvectors come from the adjugate of
//! (M - q I), whose nonzero columns span the null space.

use crate::mathkit::Complex;
use nalgebra::{Matrix3, Vector3};

/// Eigenvalues, eigenvector basis V, and its inverse, with an infinity-norm
/// condition estimate of V. `None` means the decomposition is too
/// degenerate to use and the caller should integrate numerically instead.
pub(crate) struct Eigensystem {
    pub values: [Complex; 3],
    pub vectors: [Vector3<Complex>; 3],
    pub inverse: Matrix3<Complex>,
    pub condition: f64,
}

pub(crate) fn decompose(m: &Matrix3<f64>) -> Option<Eigensystem> {
    let values = eigenvalues(m);
    let scale = m.abs().max().max(1.0);

    let mut vectors = [Vector3::zeros(); 3];
    for (k, q) in values.iter().enumerate() {
        vectors[k] = null_vector(m, *q, scale)?;
    }

    let v = Matrix3::from_columns(&vectors);
    let (inverse, det) = adjugate_inverse(&v);
    if det.norm() < 1e-14 {
        return None;
    }
    let condition = inf_norm(&v) * inf_norm(&inverse);
    Some(Eigensystem {
        values,
        vectors,
        inverse,
        condition,
    })
}

/// Roots of det(M - q I) = 0 as a monic cubic q^3 + c2 q^2 + c1 q + c0.
pub(crate) fn eigenvalues(m: &Matrix3<f64>) -> [Complex; 3] {
    let c2 = -m.trace();
    let c1 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
        + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)];
    let c0 = -m.determinant();

    let mut roots = cubic_roots(c2, c1, c0);
    for r in roots.iter_mut() {
        *r = polish(*r, c2, c1, c0);
    }
    roots
}

/// Closed-form roots of x^3 + c2 x^2 + c1 x + c0 with real coefficients.
fn cubic_roots(c2: f64, c1: f64, c0: f64) -> [Complex; 3] {
    // depress: x = y - c2/3, y^3 + p y + q = 0
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = c0 - c1 * c2 / 3.0 + 2.0 * c2.powi(3) / 27.0;

    let disc = 0.25 * q * q + p.powi(3) / 27.0;
    let ys: [Complex; 3] = if p == 0.0 && q == 0.0 {
        [Complex::new(0.0, 0.0); 3]
    } else if disc > 0.0 {
        // one real root; pick the cube root away from cancellation
        let s = disc.sqrt();
        let u = if q >= 0.0 {
            -(0.5 * q + s).cbrt()
        } else {
            (-0.5 * q + s).cbrt()
        };
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let real = u + v;
        let re = -0.5 * real;
        let im = 0.5 * 3.0_f64.sqrt() * (u - v);
        [
            Complex::new(real, 0.0),
            Complex::new(re, im),
            Complex::new(re, -im),
        ]
    } else {
        // three real roots via the trigonometric form
        let r = (-p / 3.0).sqrt();
        let arg = (-0.5 * q / r.powi(3)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        [
            Complex::new(2.0 * r * theta.cos(), 0.0),
            Complex::new(2.0 * r * (theta - tau).cos(), 0.0),
            Complex::new(2.0 * r * (theta + tau).cos(), 0.0),
        ]
    };
    ys.map(|y| y - shift)
}

/// A few Newton iterations on the monic cubic to clean up rounding from the
/// closed-form seed.
fn polish(mut x: Complex, c2: f64, c1: f64, c0: f64) -> Complex {
    for _ in 0..6 {
        let p = ((x + c2) * x + c1) * x + c0;
        let dp = (3.0 * x + 2.0 * c2) * x + c1;
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        x -= step;
        if step.norm() <= 1e-15 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

/// Null vector of A = M - q I via the adjugate (its columns satisfy
/// A adj(A) = det(A) I ~ 0), falling back to row cross-products for
/// rank-one A.
fn null_vector(m: &Matrix3<f64>, q: Complex, scale: f64) -> Option<Vector3<Complex>> {
    let a = Matrix3::from_fn(|i, j| {
        Complex::new(m[(i, j)], 0.0) - if i == j { q } else { Complex::new(0.0, 0.0) }
    });
    let (adj, _) = adjugate_inverse_raw(&a);
    let mut best = Vector3::zeros();
    let mut best_norm = 0.0;
    for j in 0..3 {
        let col = adj.column(j).clone_owned();
        let n = col.iter().map(|z| z.norm()).sum::<f64>();
        if n > best_norm {
            best_norm = n;
            best = col;
        }
    }
    if best_norm <= 1e-12 * scale * scale {
        // degenerate eigenvalue: the null space is orthogonal to the rows
        let rows: [Vector3<Complex>; 3] =
            [a.row(0).transpose(), a.row(1).transpose(), a.row(2).transpose()];
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let c = cross(&rows[i], &rows[j]);
            let n = c.iter().map(|z| z.norm()).sum::<f64>();
            if n > best_norm {
                best_norm = n;
                best = c;
            }
        }
    }
    if best_norm <= 1e-12 * scale * scale {
        return None;
    }
    Some(best.unscale(best_norm))
}

fn cross(a: &Vector3<Complex>, b: &Vector3<Complex>) -> Vector3<Complex> {
    Vector3::new(
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
}

/// Adjugate and determinant of a complex 3x3.
fn adjugate_inverse_raw(a: &Matrix3<Complex>) -> (Matrix3<Complex>, Complex) {
    let cof = |i1: usize, i2: usize, j1: usize, j2: usize| {
        a[(i1, j1)] * a[(i2, j2)] - a[(i1, j2)] * a[(i2, j1)]
    };
    let adj = Matrix3::new(
        cof(1, 2, 1, 2),
        -cof(0, 2, 1, 2),
        cof(0, 1, 1, 2),
        -cof(1, 2, 0, 2),
        cof(0, 2, 0, 2),
        -cof(0, 1, 0, 2),
        cof(1, 2, 0, 1),
        -cof(0, 2, 0, 1),
        cof(0, 1, 0, 1),
    );
    let det = a[(0, 0)] * adj[(0, 0)] + a[(0, 1)] * adj[(1, 0)] + a[(0, 2)] * adj[(2, 0)];
    (adj, det)
}

/// Inverse scaled by the adjugate; the determinant is returned so callers
/// can reject near-singular bases.
fn adjugate_inverse(a: &Matrix3<Complex>) -> (Matrix3<Complex>, Complex) {
    let (adj, det) = adjugate_inverse_raw(a);
    if det.norm() == 0.0 {
        return (adj, det);
    }
    let inv_det = Complex::new(1.0, 0.0) / det;
    (adj * inv_det, det)
}

fn inf_norm(a: &Matrix3<Complex>) -> f64 {
    (0..3)
        .map(|i| (0..3).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reconstruct(m: &Matrix3<f64>, e: &Eigensystem) -> f64 {
        // || V diag(q) V^-1 - M ||_max
        let v = Matrix3::from_columns(&e.vectors);
        let d = Matrix3::from_diagonal(&Vector3::new(e.values[0], e.values[1], e.values[2]));
        let back = v * d * e.inverse;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((back[(i, j)] - Complex::new(m[(i, j)], 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn diagonal_matrix() {
        let m = Matrix3::new(2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.5);
        let e = decompose(&m).unwrap();
        let mut vals: Vec<f64> = e.values.iter().map(|q| q.re).collect();
        vals.sort_by(f64::total_cmp);
        assert_relative_eq!(vals[0], -1.0, max_relative = 1e-14);
        assert_relative_eq!(vals[1], 0.5, max_relative = 1e-14);
        assert_relative_eq!(vals[2], 2.0, max_relative = 1e-14);
        assert!(reconstruct(&m, &e) < 1e-13);
    }

    #[test]
    fn rotation_block_has_conjugate_pair() {
        // damped rotation about x: eigenvalues -g and -g +/- i w
        let (g, w) = (0.07, 1.4);
        let m = Matrix3::new(-g, 0.0, 0.0, 0.0, -g, -w, 0.0, w, -g);
        let e = decompose(&m).unwrap();
        let n_complex = e.values.iter().filter(|q| q.im.abs() > 1e-12).count();
        assert_eq!(n_complex, 2);
        for q in &e.values {
            assert_relative_eq!(q.re, -g, max_relative = 1e-12);
            if q.im.abs() > 1e-12 {
                assert_relative_eq!(q.im.abs(), w, max_relative = 1e-12);
            }
        }
        assert!(reconstruct(&m, &e) < 1e-12);
    }

    #[test]
    fn generic_asymmetric_matrix_reconstructs() {
        let m = Matrix3::new(
            -0.3, -1.1, 0.0, 0.9, -0.05, -0.7, 0.02, 0.64, -0.4,
        );
        let e = decompose(&m).unwrap();
        assert!(reconstruct(&m, &e) < 1e-12, "residual {}", reconstruct(&m, &e));
        assert!(e.condition < 1e4);
    }

    #[test]
    fn zero_matrix_is_rejected() {
        // triple-degenerate null space: no usable eigenbasis
        assert!(decompose(&Matrix3::zeros()).is_none());
    }

    #[test]
    fn defective_matrix_is_rejected_or_flagged() {
        // Jordan block: defective, eigenvectors collapse
        let m = Matrix3::new(1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0);
        match decompose(&m) {
            None => {}
            Some(e) => assert!(e.condition > 1e8, "condition {}", e.condition),
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(64))]
        #[test]
        fn random_generators_reconstruct(
            a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0,
            d in -2.0f64..2.0, ee in -2.0f64..2.0, f in -2.0f64..2.0,
        ) {
            // Bloch-like pattern: damped rotation plus cross terms
            let m = Matrix3::new(
                -a.abs(), -b, 0.0,
                b, -c.abs(), -d,
                ee * 0.1, d, -f.abs() - 0.1,
            );
            if let Some(e) = decompose(&m) {
                if e.condition < 1e8 {
                    proptest::prop_assert!(reconstruct(&m, &e) < 1e-9 * e.condition.max(1.0));
                }
            }
        }
    }
}
