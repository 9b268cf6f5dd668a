//! Adaptive Dormand-Prince 5(4) integration of the affine Bloch equation.
//!
//! Used when the generator's eigenbasis is too ill-conditioned for the
//! spectral propagator: the system da/dt = M a + b is tiny (three
//! components) and smooth, so an embedded Runge-Kutta pair with simple
//! step-halving control is plenty.

use crate::{Error, Result};
use nalgebra::{Matrix3, Vector3};

const SAFETY: f64 = 0.9;
const MIN_SHRINK: f64 = 0.2;
const MAX_GROW: f64 = 5.0;

/// Integrate from t = times[0] through each requested time, returning the
/// state at every entry. `times` must be nondecreasing.
pub(crate) fn integrate(
    m: &Matrix3<f64>,
    b: &Vector3<f64>,
    initial: Vector3<f64>,
    times: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<Vec<Vector3<f64>>> {
    let f = |y: &Vector3<f64>| m * y + b;

    let mut out = Vec::with_capacity(times.len());
    if times.is_empty() {
        return Ok(out);
    }

    let mut t = times[0];
    let mut y = initial;
    out.push(y);

    // initial step from the generator's own time scale
    let rate_scale = m.abs().max().max(b.abs().max()).max(1e-6);
    let mut h = (0.1 / rate_scale).min(1.0);
    let mut k1 = f(&y);

    for &target in &times[1..] {
        while t < target {
            // clip to land on the target; a clipped step must not feed the
            // controller or it would read as a spurious stall
            let clipped = target - t < h;
            let trial = h.min(target - t);
            let (y_next, k_next, err) = step(&f, &y, &k1, trial, rtol, atol);
            if err <= 1.0 {
                t += trial;
                y = y_next;
                k1 = k_next; // first-same-as-last
                if !clipped {
                    let grow = if err == 0.0 {
                        MAX_GROW
                    } else {
                        (SAFETY * err.powf(-0.2)).clamp(MIN_SHRINK, MAX_GROW)
                    };
                    h *= grow;
                }
            } else {
                h = trial * (SAFETY * err.powf(-0.2)).clamp(MIN_SHRINK, 1.0);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StiffIntegration { t, step: h });
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// One embedded step of size `h`; returns the 5th-order solution, the fresh
/// slope at its endpoint, and the error norm scaled so that <= 1 accepts.
fn step<F: Fn(&Vector3<f64>) -> Vector3<f64>>(
    f: &F,
    y: &Vector3<f64>,
    k1: &Vector3<f64>,
    h: f64,
    rtol: f64,
    atol: f64,
) -> (Vector3<f64>, Vector3<f64>, f64) {
    let k2 = f(&(y + h * (A21 * k1)));
    let k3 = f(&(y + h * (A31 * k1 + A32 * k2)));
    let k4 = f(&(y + h * (A41 * k1 + A42 * k2 + A43 * k3)));
    let k5 = f(&(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)));
    let k6 = f(&(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)));
    let y5 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = f(&y5);

    let err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    let mut err: f64 = 0.0;
    for i in 0..3 {
        let scale = atol + rtol * y[i].abs().max(y5[i].abs());
        err = err.max((err_vec[i] / scale).abs());
    }
    (y5, k7, err)
}

// Dormand-Prince tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
