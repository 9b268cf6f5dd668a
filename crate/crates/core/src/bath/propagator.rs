//! Displacement phase propagator of the dressed exchange coupling.
//!
//! The polaron transformation trades the site-diagonal coupling for a phase
//! cloud around each site; the surviving fluctuations of the dressed
//! exchange are governed by
//!
//!   phi(tau) = 2 int_0^inf dw J(w)/w^2 (1 - F(w/mu))
//!              [cos(w tau) coth(beta w / 2) - i sin(w tau)]
//!
//! and by its symmetrized companion, evaluated a half thermal period into
//! the complex plane,
//!
//!   phi_sym(tau) = phi(tau - i beta/2)
//!                = 2 int_0^inf dw J(w)/w^2 (1 - F(w/mu)) cos(w tau)/sinh(beta w / 2),
//!
//! which is real and even in tau. For the three-dimensional kernel both
//! integrals resum into digamma and polygamma functions; for d = 1, 2 the
//! propagator falls back to direct quadrature.

use crate::bath::{BathModel, Mu, ThermalState};
use crate::mathkit::{digamma, integrate_semi_infinite, polygamma, polygamma_any, Complex};
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Quadrature tolerance used for construction-time constants and numeric
/// fallbacks that don't take an explicit tolerance.
const INTERNAL_TOL: f64 = 1e-12;

/// Evaluator for the displacement phase at one bath and temperature.
#[derive(Debug, Clone, Copy)]
pub struct Propagator {
    bath: BathModel,
    thermal: ThermalState,
    phi_zero: f64,
}

impl Propagator {
    pub fn new(bath: BathModel, thermal: ThermalState) -> Result<Self> {
        bath.validate()?;
        let mut p = Propagator {
            bath,
            thermal,
            phi_zero: 0.0,
        };
        p.phi_zero = if bath.dimension == 3 {
            let v = p.phi_analytic(Complex::new(0.0, 0.0))?;
            debug_assert!(v.im.abs() < 1e-10 * v.re.abs().max(1.0));
            v.re
        } else {
            p.phi_numeric(0.0, INTERNAL_TOL)?.re
        };
        Ok(p)
    }

    pub fn bath(&self) -> &BathModel {
        &self.bath
    }

    pub fn thermal(&self) -> &ThermalState {
        &self.thermal
    }

    /// phi(0), the total dressed fluctuation strength. Controls the
    /// dressing factor through B^2 = exp(-phi(0)).
    pub fn phi_zero(&self) -> f64 {
        self.phi_zero
    }

    /// Dressing factor B = exp(-phi(0)/2).
    pub fn dressing(&self) -> f64 {
        (-0.5 * self.phi_zero).exp()
    }

    /// Displacement phase at real time lag.
    pub fn phi(&self, tau: f64) -> Result<Complex> {
        if self.bath.dimension == 3 {
            self.phi_analytic(Complex::new(tau, 0.0))
        } else {
            self.phi_numeric(tau, INTERNAL_TOL)
        }
    }

    /// Displacement phase continued into the strip |Im tau| <= beta/2.
    pub fn phi_complex(&self, tau: Complex) -> Result<Complex> {
        if self.bath.dimension != 3 {
            return Err(Error::AnalyticNeedsD3(self.bath.dimension));
        }
        let half = 0.5 * self.thermal.beta;
        if tau.im.abs() > half * (1.0 + 1e-12) {
            return Err(Error::InvalidModel(format!(
                "phase continuation restricted to |Im tau| <= beta/2 = {half}, got {}",
                tau.im
            )));
        }
        self.phi_analytic(tau)
    }

    /// Symmetrized phase phi(tau - i beta/2); real and even in tau.
    pub fn phi_sym(&self, tau: f64) -> Result<f64> {
        if self.bath.dimension == 3 {
            Ok(self.big_phi0() * self.c_function(PI * tau / self.thermal.beta)?)
        } else {
            self.phi_sym_numeric(tau, INTERNAL_TOL)
        }
    }

    /// Direct quadrature of phi(tau); exercised against the closed form in
    /// the test suite and used for d = 1, 2.
    pub fn phi_numeric(&self, tau: f64, tol: f64) -> Result<Complex> {
        if self.bath.mu == Mu::Infinite {
            return Ok(Complex::new(0.0, 0.0));
        }
        let bath = self.bath;
        let th = self.thermal;
        let scale = scale_for(&bath, &th);
        let re = integrate_semi_infinite(
            |w| 2.0 * bath.exchange_weight(w) * (w * tau).cos() * th.coth_half(w),
            scale,
            tol,
        )?;
        let im = integrate_semi_infinite(
            |w| -2.0 * bath.exchange_weight(w) * (w * tau).sin(),
            scale,
            tol,
        )?;
        Ok(Complex::new(re.value, im.value))
    }

    /// Direct quadrature of the symmetrized phase.
    pub fn phi_sym_numeric(&self, tau: f64, tol: f64) -> Result<f64> {
        if self.bath.mu == Mu::Infinite {
            return Ok(0.0);
        }
        let bath = self.bath;
        let th = self.thermal;
        // sinh suppresses everything past a few temperatures; the integrand
        // is smooth at 0 where J/w^2 / sinh -> 2 alpha w / beta-ish
        let integrand = move |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let s = (0.5 * th.beta * w).sinh();
            2.0 * bath.exchange_weight(w) * (w * tau).cos() / s
        };
        let scale = scale_for(&bath, &th).min(2.0 / th.beta);
        Ok(integrate_semi_infinite(integrand, scale, tol)?.value)
    }

    /// The scale 2 pi^2 alpha T^2 multiplying the shape function of the
    /// symmetrized phase.
    pub fn big_phi0(&self) -> f64 {
        2.0 * PI * PI * self.bath.alpha * self.thermal.temperature * self.thermal.temperature
    }

    /// Quadratic saddle data of the symmetrized phase around tau = 0.
    pub fn saddle_coefficients(&self) -> Result<SaddleCoefficients> {
        if self.bath.dimension != 3 {
            return Err(Error::AnalyticNeedsD3(self.bath.dimension));
        }
        let a = self.half_plus_y_inv();
        let (c0, c2) = match self.bath.mu {
            Mu::Infinite => (0.0, 0.0),
            Mu::Zero => {
                let tri = polygamma(1, Complex::new(a, 0.0))?.re;
                let penta = polygamma(3, Complex::new(a, 0.0))?.re;
                (2.0 / (PI * PI) * tri, penta / PI.powi(4))
            }
            Mu::Finite(mu) => {
                let x = PI * self.thermal.temperature / mu;
                let za = Complex::new(a, x / PI);
                let psi3 = polygamma(3, Complex::new(a, 0.0))?.re;
                let c0 = if x > 1e-2 {
                    -2.0 / (PI * x) * digamma(za)?.im + 2.0 / (PI * PI) * polygamma(1, Complex::new(a, 0.0))?.re
                } else {
                    let psi5 = polygamma_any(5, Complex::new(a, 0.0))?.re;
                    x * x * psi3 / (3.0 * PI.powi(4)) - x.powi(4) * psi5 / (60.0 * PI.powi(6))
                };
                let c2 = if x > 1e-3 {
                    -1.0 / (PI.powi(3) * x) * polygamma(2, za)?.im + psi3 / PI.powi(4)
                } else {
                    let psi5 = polygamma_any(5, Complex::new(a, 0.0))?.re;
                    x * x * psi5 / (6.0 * PI.powi(6))
                };
                (c0, c2)
            }
        };
        Ok(SaddleCoefficients {
            scale: self.big_phi0(),
            c0,
            c2,
        })
    }

    /// A = 1/2 + T/omega_c, the common polygamma argument offset.
    fn half_plus_y_inv(&self) -> f64 {
        0.5 + self.thermal.temperature / self.bath.omega_c
    }

    /// Closed-form phi for the three-dimensional kernel, valid for complex
    /// tau in the strip |Im tau| <= beta/2:
    ///
    ///   phi = 2 alpha [ 1/z^2 - 1/(z^2 + b^2)
    ///         + (psi'(1 + (p0 - i tau)/beta) + psi'(1 + (p0 + i tau)/beta)) / beta^2
    ///         - S ],   z = p0 + i tau,  p0 = 1/omega_c,  b = 1/mu,
    ///
    /// where S collects four digammas from the sinc kernel,
    ///
    ///   S = [ psi(1 + (p0 - i tau + i b)/beta) - psi(1 + (p0 - i tau - i b)/beta)
    ///       + psi(1 + (p0 + i tau + i b)/beta) - psi(1 + (p0 + i tau - i b)/beta) ]
    ///       / (2 i b beta).
    ///
    /// The b-dependent pieces drop out as mu -> 0 (b -> inf) and the whole
    /// expression vanishes for coinciding sites.
    fn phi_analytic(&self, tau: Complex) -> Result<Complex> {
        if self.bath.mu == Mu::Infinite {
            return Ok(Complex::new(0.0, 0.0));
        }
        let alpha = self.bath.alpha;
        let beta = self.thermal.beta;
        let p0 = 1.0 / self.bath.omega_c;
        let b = self.bath.mu.inverse();
        let i = Complex::new(0.0, 1.0);
        let itau = i * tau;

        let z = Complex::new(p0, 0.0) + itau;
        let z2 = z * z;
        let mut val = z2.inv();
        if b.is_finite() {
            val -= (z2 + b * b).inv();
        }

        let arg_m = (Complex::new(p0, 0.0) - itau) / beta + 1.0;
        let arg_p = (Complex::new(p0, 0.0) + itau) / beta + 1.0;
        val += (polygamma(1, arg_m)? + polygamma(1, arg_p)?) / (beta * beta);

        if b.is_finite() {
            let ib = i * b / beta;
            let s = digamma(arg_m + ib)? - digamma(arg_m - ib)? + digamma(arg_p + ib)?
                - digamma(arg_p - ib)?;
            val -= s / (2.0 * i * b * beta);
        }
        Ok(2.0 * alpha * val)
    }

    /// Shape function C of the symmetrized phase, phi_sym = big_phi0 * C,
    /// written in the manifestly real form
    ///
    ///   C(t) = -(1/(pi x)) [Im psi(A + i(t + x)/pi) - Im psi(A + i(t - x)/pi)]
    ///        + (2/pi^2) Re psi'(A + i t/pi),        t = pi tau / beta,
    ///
    /// with A = 1/2 + T/omega_c and x = pi T / mu. The first bracket is the
    /// sinc-kernel contribution and drops out as x -> inf (mu -> 0).
    fn c_function(&self, tau_p: f64) -> Result<f64> {
        let a = self.half_plus_y_inv();
        match self.bath.mu {
            Mu::Infinite => Ok(0.0),
            Mu::Zero => {
                let tri = polygamma(1, Complex::new(a, tau_p / PI))?;
                Ok(2.0 / (PI * PI) * tri.re)
            }
            Mu::Finite(mu) => {
                let x = PI * self.thermal.temperature / mu;
                let hi = digamma(Complex::new(a, (tau_p + x) / PI))?.im;
                let lo = digamma(Complex::new(a, (tau_p - x) / PI))?.im;
                let tri = polygamma(1, Complex::new(a, tau_p / PI))?.re;
                Ok(-(hi - lo) / (PI * x) + 2.0 / (PI * PI) * tri)
            }
        }
    }
}

fn scale_for(bath: &BathModel, thermal: &ThermalState) -> f64 {
    bath.omega_c.max(1.0 / thermal.beta)
}

/// Quadratic expansion of the symmetrized phase about its peak:
/// phi_sym(tau) ~ scale * (c0 - c2 (pi tau / beta)^2). Feeds the Gaussian
/// saddle estimate of the spectral response and the closed-form crossover
/// temperature.
#[derive(Debug, Clone, Copy)]
pub struct SaddleCoefficients {
    /// 2 pi^2 alpha T^2.
    pub scale: f64,
    /// Peak coefficient; phi_sym(0) = scale * c0.
    pub c0: f64,
    /// Curvature coefficient (positive when the peak is a maximum).
    pub c2: f64,
}

impl SaddleCoefficients {
    /// phi_sym(0).
    pub fn peak(&self) -> f64 {
        self.scale * self.c0
    }

    /// Gaussian width parameter scale * c2.
    pub fn width(&self) -> f64 {
        self.scale * self.c2
    }
}
