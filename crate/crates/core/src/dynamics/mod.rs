//! Time evolution of the Bloch vector.
//!
//! The generator assembled in `bloch` is a constant-coefficient affine
//! system da/dt = M a + b. Its solution is computed spectrally: the 3x3
//! matrix is eigendecomposed directly (characteristic cubic plus Newton
//! polish) and the propagator applied in the eigenbasis. When the basis is
//! too ill-conditioned — degenerate rates, defective matrices injected by
//! parameter scans — the module falls back to adaptive Runge-Kutta
//! integration, so `evolve` succeeds for every generator the builders can
//! produce.
//!
//! Alongside the exact propagator, the closed-form solutions available in
//! particular regimes are provided for cross-checking and for fast scans:
//!
//! - resonant: all three components, valid for the block-diagonal resonant
//!   generator at zero bias, with the oscillation/overdamped branches and
//!   the degenerate point handled through one analytic continuation;
//! - weak coupling: the population alpha_z, a sum of incoherent relaxation
//!   toward the thermal state and a damped oscillation at xi_w;
//! - high temperature: the population at first or second order in
//!   V_R / eps, plus the small persistent coherence alpha_y.
//!
//! Components x and y of every trajectory are lab-frame coherences (the
//! generator is written for the lab Bloch vector); alpha_z is identical in
//! the lab and polaron frames. `BlochTrajectory::to_polaron` divides the
//! dressing factor back out when polaron-frame coherences are wanted.

mod eig3;
mod rk;

use crate::bloch::{resonant_xi_squared, Generator, Regime};
use crate::mathkit::Complex;
use crate::{Error, Result};
use nalgebra::{Matrix3, Vector3};

/// A Bloch vector (alpha_x, alpha_y, alpha_z).
pub type BlochVector = Vector3<f64>;

/// Which frame the x and y components of a trajectory refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Coherences as measured in the lab: alpha_{x,y} = B alpha_{x,y}^P.
    Lab,
    /// Coherences of the polaron-transformed state.
    Polaron,
}

/// The initial state with the excitation fully on the donor.
pub fn donor_start() -> BlochVector {
    Vector3::new(0.0, 0.0, 1.0)
}

/// Sampled solution of the Bloch equation.
#[derive(Debug, Clone)]
pub struct BlochTrajectory {
    pub frame: Frame,
    /// Dressing factor used to map coherences between frames.
    pub dressing: f64,
    pub times: Vec<f64>,
    pub states: Vec<BlochVector>,
}

impl BlochTrajectory {
    /// Coherences divided by the dressing factor. Idempotent.
    pub fn to_polaron(&self) -> BlochTrajectory {
        if self.frame == Frame::Polaron {
            return self.clone();
        }
        let inv = 1.0 / self.dressing;
        BlochTrajectory {
            frame: Frame::Polaron,
            dressing: self.dressing,
            times: self.times.clone(),
            states: self
                .states
                .iter()
                .map(|a| Vector3::new(a[0] * inv, a[1] * inv, a[2]))
                .collect(),
        }
    }

    /// Coherences multiplied by the dressing factor.
    pub fn to_lab_frame(&self) -> Result<BlochTrajectory> {
        if self.frame == Frame::Lab {
            return Err(Error::AlreadyLabFrame);
        }
        let b = self.dressing;
        Ok(BlochTrajectory {
            frame: Frame::Lab,
            dressing: b,
            times: self.times.clone(),
            states: self
                .states
                .iter()
                .map(|a| Vector3::new(a[0] * b, a[1] * b, a[2]))
                .collect(),
        })
    }

    /// The z (population-difference) column.
    pub fn population(&self) -> Vec<f64> {
        self.states.iter().map(|a| a[2]).collect()
    }
}

/// Condition-number ceiling beyond which the spectral propagator is not
/// trusted and integration switches to Runge-Kutta.
const CONDITION_LIMIT: f64 = 1e8;
const RK_RTOL: f64 = 1e-10;
const RK_ATOL: f64 = 1e-12;

/// Fixed point of da/dt = M a + b.
///
/// When M is singular but the drive vanishes (decoupled or decoherence-free
/// generators), the dynamics conserves a component and every point of an
/// invariant set is stationary; the centroid (the zero vector) is returned.
/// A singular M with a nonzero drive has no stationary state at all.
pub fn steady_state(generator: &Generator) -> Result<BlochVector> {
    let m = generator.matrix();
    let det = m.determinant();
    let scale = m.abs().max();
    if det.abs() <= 1e-14 * scale.powi(3) || scale == 0.0 {
        if generator.drive().norm() == 0.0 {
            return Ok(Vector3::zeros());
        }
        return Err(Error::SingularGenerator(det));
    }
    m.lu()
        .solve(&(-generator.drive()))
        .ok_or(Error::SingularGenerator(det))
}

/// Eigenvalues of a drift matrix, for spectral diagnostics (decay rates are
/// the negated real parts, oscillation frequencies the imaginary parts).
pub fn eigen_frequencies(matrix: &Matrix3<f64>) -> Result<[Complex; 3]> {
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidModel(
            "drift matrix entries must be finite".into(),
        ));
    }
    Ok(eig3::eigenvalues(matrix))
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidModel("times must be finite".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidModel("times must be nondecreasing".into()));
    }
    Ok(())
}

/// Solve the Bloch equation from `initial` (given at `times[0]`), sampling
/// the solution at each requested time.
pub fn evolve(generator: &Generator, initial: BlochVector, times: &[f64]) -> Result<BlochTrajectory> {
    validate_times(times)?;
    let m = generator.matrix();
    let b = generator.drive();

    let mut states = if b.norm() == 0.0 {
        propagate_homogeneous(m, initial, times)?
    } else {
        match steady_state(generator) {
            Ok(fixed) => propagate_homogeneous(m, initial - fixed, times)?
                .into_iter()
                .map(|a| a + fixed)
                .collect(),
            // no unique fixed point to shift by: integrate the affine
            // system head-on
            Err(Error::SingularGenerator(_)) => {
                rk::integrate(m, b, initial, times, RK_RTOL, RK_ATOL)?
            }
            Err(e) => return Err(e),
        }
    };
    // At t0 the solution is the initial condition exactly; don't let the
    // eigenbasis round-trip smear it.
    if let Some(&t0) = times.first() {
        for (i, &t) in times.iter().enumerate() {
            if t == t0 {
                states[i] = initial;
            } else {
                break;
            }
        }
    }

    Ok(BlochTrajectory {
        frame: Frame::Lab,
        dressing: generator.quantities.dressing,
        times: times.to_vec(),
        states,
    })
}

/// Propagate da/dt = M a spectrally, or by Runge-Kutta when the eigenbasis
/// is unusable.
fn propagate_homogeneous(
    m: &Matrix3<f64>,
    initial: BlochVector,
    times: &[f64],
) -> Result<Vec<BlochVector>> {
    if let Some(eig) = eig3::decompose(m) {
        if eig.condition <= CONDITION_LIMIT {
            let t0 = times.first().copied().unwrap_or(0.0);
            let y0 = Vector3::new(
                Complex::new(initial[0], 0.0),
                Complex::new(initial[1], 0.0),
                Complex::new(initial[2], 0.0),
            );
            let coeffs = eig.inverse * y0;
            return Ok(times
                .iter()
                .map(|&t| {
                    let dt = t - t0;
                    let mut acc = Vector3::new(
                        Complex::new(0.0, 0.0),
                        Complex::new(0.0, 0.0),
                        Complex::new(0.0, 0.0),
                    );
                    for k in 0..3 {
                        let w = (eig.values[k] * dt).exp() * coeffs[k];
                        acc += eig.vectors[k] * w;
                    }
                    // spectrum is conjugate-closed, so the imaginary parts
                    // cancel to rounding
                    Vector3::new(acc[0].re, acc[1].re, acc[2].re)
                })
                .collect());
        }
    }
    rk::integrate(m, &Vector3::zeros(), initial, times, RK_RTOL, RK_ATOL)
}

/// cos(sqrt(d) t / 2) and sin(sqrt(d) t / 2) / sqrt(d), analytic in d so a
/// single expression covers the oscillatory (d > 0), overdamped (d < 0),
/// and critically damped (d ~ 0) branches.
fn damped_mode(d: f64, t: f64) -> (f64, f64) {
    let u = d * t * t / 4.0;
    if u.abs() < 1e-6 {
        let c = 1.0 - u / 2.0 + u * u / 24.0 - u * u * u / 720.0;
        let s = 0.5 * t * (1.0 - u / 6.0 + u * u / 120.0);
        (c, s)
    } else if d > 0.0 {
        let x = d.sqrt() * t / 2.0;
        (x.cos(), x.sin() / d.sqrt())
    } else {
        let x = (-d).sqrt() * t / 2.0;
        (x.cosh(), x.sinh() / (-d).sqrt())
    }
}

fn require_resonant_rates(generator: &Generator) -> Result<()> {
    if !generator.system.is_resonant() {
        return Err(Error::BiasNotZero(generator.system.bias));
    }
    match generator.rates.regime {
        Some(Regime::Resonant) | Some(Regime::Full) | None => Ok(()),
        Some(other) => Err(Error::InvalidModel(format!(
            "resonant closed form needs resonant or full rates, got {other}"
        ))),
    }
}

/// Analytic solution of the resonant generator from the donor state
/// (0, 0, 1), evaluated at each time.
///
/// The x component relaxes on its own toward the driven fixed point; the
/// y-z block is a damped rotation whose discriminant xi^2 selects damped
/// oscillation, critical damping, or biexponential decay. All branches are
/// evaluated through one analytic continuation, so the trajectory is a
/// continuous function of the rates across the crossover.
pub fn closed_form_resonant(generator: &Generator, times: &[f64]) -> Result<BlochTrajectory> {
    require_resonant_rates(generator)?;
    validate_times(times)?;

    let r = &generator.rates;
    let q = &generator.quantities;
    let gamma_x = r.gamma_z - r.gamma_y;
    let s = r.gamma_y + r.gamma_z;
    let delta = r.gamma_y - r.gamma_z;
    let d = generator
        .xi_squared()
        .unwrap_or_else(|| resonant_xi_squared(q, r));
    let x_inf = if gamma_x > 0.0 {
        -q.dressing * r.kappa_x / gamma_x
    } else {
        0.0
    };
    let y_amp = -4.0 * q.dressing * q.v_renorm;

    let states = times
        .iter()
        .map(|&t| {
            let (c, sn) = damped_mode(d, t);
            let envelope = (-0.5 * s * t).exp();
            Vector3::new(
                x_inf * (1.0 - (-gamma_x * t).exp()),
                y_amp * envelope * sn,
                envelope * (c + delta * sn),
            )
        })
        .collect();

    Ok(BlochTrajectory {
        frame: Frame::Lab,
        dressing: q.dressing,
        times: times.to_vec(),
        states,
    })
}

/// Resonant stationary state in thermal form: (-B tanh(beta V_R), 0, 0).
///
/// Exact when the rates satisfy detailed balance; numerically it agrees
/// with `steady_state` to the accuracy of the correlator transforms.
pub fn resonant_steady_state(generator: &Generator) -> Result<BlochVector> {
    require_resonant_rates(generator)?;
    let q = &generator.quantities;
    Ok(Vector3::new(
        -q.dressing * (generator.beta * q.v_renorm).tanh(),
        0.0,
        0.0,
    ))
}

/// Population dynamics of the weak-coupling (one-phonon) generator from
/// the donor state:
///
///   az(t) = (eps/eta) [ (eps/eta) e^{-G t} - (1 - e^{-G t}) tanh(beta eta/2) ]
///         + (4 V_R^2/eta^2) e^{-G t/2} [ cos(xi_w t/2) - (G/xi_w) sin(xi_w t/2) ]
///
/// with xi_w^2 = 4 eta (eta + Lambda) - G^2. A negative xi_w^2 is outside
/// the regime's validity and is reported as an error rather than continued.
pub fn closed_form_weak_population(generator: &Generator, times: &[f64]) -> Result<Vec<f64>> {
    if generator.rates.regime != Some(Regime::Weak) {
        return Err(Error::InvalidModel(
            "weak closed form needs weak-regime rates".into(),
        ));
    }
    validate_times(times)?;
    let q = &generator.quantities;
    if q.eta == 0.0 {
        return Err(Error::InvalidModel(
            "weak closed form needs a nonzero dressed splitting".into(),
        ));
    }
    let d = generator.xi_squared().unwrap_or(0.0);
    if d <= 0.0 {
        return Err(Error::ImaginaryWeakFrequency(d));
    }

    let g = generator.rates.gamma_x;
    let ce = generator.system.bias / q.eta;
    let cv2 = (2.0 * q.v_renorm / q.eta).powi(2);
    let th = (0.5 * generator.beta * q.eta).tanh();

    Ok(times
        .iter()
        .map(|&t| {
            let e1 = (-g * t).exp();
            let e2 = (-0.5 * g * t).exp();
            let (c, sn) = damped_mode(d, t);
            ce * (ce * e1 - (1.0 - e1) * th) + cv2 * e2 * (c - g * sn)
        })
        .collect())
}

/// Weak-coupling stationary state:
/// (-(2 B V_R / eta) tanh(beta eta/2), 0, -(eps/eta) tanh(beta eta/2)).
pub fn weak_steady_state(generator: &Generator) -> Result<BlochVector> {
    if generator.rates.regime != Some(Regime::Weak) {
        return Err(Error::InvalidModel(
            "weak steady state needs weak-regime rates".into(),
        ));
    }
    let q = &generator.quantities;
    if q.eta == 0.0 {
        return Ok(Vector3::zeros());
    }
    let th = (0.5 * generator.beta * q.eta).tanh();
    Ok(Vector3::new(
        -(2.0 * q.dressing * q.v_renorm / q.eta) * th,
        0.0,
        -(generator.system.bias / q.eta) * th,
    ))
}

/// Truncation order of the high-temperature expansion in V_R / eps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    First,
    Second,
}

fn require_high_t(generator: &Generator) -> Result<()> {
    if generator.rates.regime != Some(Regime::HighTemperature) {
        return Err(Error::InvalidModel(
            "high-temperature closed form needs high-temperature rates".into(),
        ));
    }
    if generator.system.bias == 0.0 {
        return Err(Error::BiasZero);
    }
    Ok(())
}

/// Oscillation frequency of the high-temperature coherence:
/// eps + (lambda_1 + lambda_2)/2 + 2 V_R^2 / eps.
fn shifted_bias(generator: &Generator) -> f64 {
    let eps = generator.system.bias;
    eps + 0.5 * (generator.rates.lambda_1 + generator.rates.lambda_2)
        + 2.0 * generator.quantities.v_renorm.powi(2) / eps
}

/// Population dynamics in the high-temperature limit from the donor state.
///
/// At first order the transfer is purely incoherent relaxation toward the
/// thermal population; at second order a small oscillation at the shifted
/// bias rides on top — the component that never vanishes off resonance.
pub fn closed_form_high_t_population(
    generator: &Generator,
    times: &[f64],
    order: ExpansionOrder,
) -> Result<Vec<f64>> {
    require_high_t(generator)?;
    validate_times(times)?;
    let r = &generator.rates;
    let th = (0.5 * generator.beta * generator.quantities.eta).tanh();
    let gz = r.gamma_z;

    match order {
        ExpansionOrder::First => Ok(times
            .iter()
            .map(|&t| {
                let e1 = (-gz * t).exp();
                e1 - (1.0 - e1) * th
            })
            .collect()),
        ExpansionOrder::Second => {
            let a2 = (2.0 * generator.quantities.v_renorm / generator.system.bias).powi(2);
            let correction = if gz > 0.0 {
                a2 * (r.gamma_y / gz - 1.0)
            } else {
                0.0
            };
            let ebar = shifted_bias(generator);
            Ok(times
                .iter()
                .map(|&t| {
                    let e1 = (-gz * t).exp();
                    let e2 = (-0.5 * gz * t).exp();
                    e1 * (1.0 - a2) + a2 * e2 * (ebar * t).cos()
                        - (1.0 - e1) * th * (1.0 + correction)
                })
                .collect())
        }
    }
}

/// The persistent high-temperature coherence
/// alpha_y(t) = -(2 B V_R / eps) e^{-Gamma_z t / 2} sin(ebar t):
/// off resonance the coherence oscillates at every finite temperature,
/// even when the population transfer is fully incoherent.
pub fn closed_form_high_t_coherence(generator: &Generator, times: &[f64]) -> Result<Vec<f64>> {
    require_high_t(generator)?;
    validate_times(times)?;
    let q = &generator.quantities;
    let amp = -2.0 * q.dressing * q.v_renorm / generator.system.bias;
    let ebar = shifted_bias(generator);
    let gz = generator.rates.gamma_z;
    Ok(times
        .iter()
        .map(|&t| amp * (-0.5 * gz * t).exp() * (ebar * t).sin())
        .collect())
}

/// High-temperature stationary population at second order in V_R / eps:
/// -(1 + (4 V_R^2/eps^2)(Gamma_y/Gamma_z - 1)) tanh(beta eta / 2).
pub fn high_t_steady_population(generator: &Generator) -> Result<f64> {
    require_high_t(generator)?;
    let r = &generator.rates;
    let th = (0.5 * generator.beta * generator.quantities.eta).tanh();
    let a2 = (2.0 * generator.quantities.v_renorm / generator.system.bias).powi(2);
    let correction = if r.gamma_z > 0.0 {
        a2 * (r.gamma_y / r.gamma_z - 1.0)
    } else {
        0.0
    };
    Ok(-(1.0 + correction) * th)
}
