//! Phonon environment: spectral density, spatial correlation of the two
//! site couplings, thermal occupation, and the polaron dressing factor.
//!
//! Both sites couple to one phonon field. A mode of frequency w sees the two
//! sites with a relative phase set by w times the travel time between them,
//! so the cross-correlation of the site couplings carries a kernel F(w/mu)
//! where mu is the phonon velocity divided by the site separation (in
//! internal units). Only the anticorrelated part 1 - F(w/mu) of the
//! fluctuations couples to the excitation exchange.

mod propagator;

pub use propagator::{Propagator, SaddleCoefficients};

use crate::mathkit::{harmonic_number, integrate_semi_infinite, polygamma, Complex};
use crate::{Error, Result};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// Ratio of phonon velocity to site separation, in units of the lattice
/// frequency scale. The limits are physical configurations, not error
/// states: `Zero` means infinitely separated sites (fully anticorrelated
/// fluctuations), `Infinite` means coinciding sites (fully correlated
/// fluctuations, which decouple from the exchange entirely).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mu {
    /// mu = 0: correlation kernel vanishes at every nonzero frequency.
    Zero,
    /// Finite positive velocity-to-separation ratio.
    Finite(f64),
    /// mu -> infinity: kernel is 1, the environment is decoherence-free.
    Infinite,
}

impl Mu {
    /// Build from a raw number; infinity maps to `Infinite`, zero to `Zero`.
    pub fn from_value(v: f64) -> Result<Self> {
        if v.is_nan() || v < 0.0 {
            return Err(Error::InvalidModel(format!(
                "correlation ratio mu must be >= 0, got {v}"
            )));
        }
        Ok(if v == 0.0 {
            Mu::Zero
        } else if v.is_infinite() {
            Mu::Infinite
        } else {
            Mu::Finite(v)
        })
    }

    /// The finite value, if there is one.
    pub fn value(&self) -> Option<f64> {
        match self {
            Mu::Finite(v) => Some(*v),
            _ => None,
        }
    }

    /// 1/mu, with the conventions 1/0 = inf and 1/inf = 0.
    pub fn inverse(&self) -> f64 {
        match self {
            Mu::Zero => f64::INFINITY,
            Mu::Finite(v) => 1.0 / v,
            Mu::Infinite => 0.0,
        }
    }
}

impl std::fmt::Display for Mu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mu::Zero => write!(f, "0"),
            Mu::Finite(v) => write!(f, "{v}"),
            Mu::Infinite => write!(f, "infinite"),
        }
    }
}

impl std::str::FromStr for Mu {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "infinite" | "inf" | "infinity" => Ok(Mu::Infinite),
            other => {
                let v: f64 = other.parse().map_err(|_| {
                    Error::InvalidModel(format!("cannot parse correlation ratio from '{s}'"))
                })?;
                Mu::from_value(v)
            }
        }
    }
}

impl Serialize for Mu {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Mu::Zero => ser.serialize_f64(0.0),
            Mu::Finite(v) => ser.serialize_f64(*v),
            Mu::Infinite => ser.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for Mu {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct MuVisitor;

        impl<'de> Visitor<'de> for MuVisitor {
            type Value = Mu;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a non-negative number or the string \"infinite\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Mu, E> {
                Mu::from_value(v).map_err(|e| E::custom(e.to_string()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Mu, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Mu, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Mu, E> {
                s.parse().map_err(|e: Error| E::custom(e.to_string()))
            }
        }

        de.deserialize_any(MuVisitor)
    }
}

/// Superohmic phonon environment with exponential cutoff and spatially
/// correlated site couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathModel {
    /// Dimensionless coupling strength (per unit cutoff-cubed).
    pub alpha: f64,
    /// Spectral cutoff frequency.
    pub omega_c: f64,
    /// Phonon velocity over site separation; controls cross-correlation.
    pub mu: Mu,
    /// Spatial dimension of the phonon field (1, 2, or 3).
    pub dimension: u32,
}

impl BathModel {
    /// Three-dimensional bath, the configuration with closed-form kernels.
    pub fn three_dimensional(alpha: f64, omega_c: f64, mu: Mu) -> Self {
        BathModel {
            alpha,
            omega_c,
            mu,
            dimension: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        // alpha = 0 is a decoupled environment: every kernel vanishes and
        // the dynamics is purely coherent.
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidModel(format!(
                "coupling strength must be non-negative and finite, got {}",
                self.alpha
            )));
        }
        if !(self.omega_c > 0.0) || !self.omega_c.is_finite() {
            return Err(Error::InvalidModel(format!(
                "cutoff frequency must be positive and finite, got {}",
                self.omega_c
            )));
        }
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::UnsupportedDimension(self.dimension));
        }
        Ok(())
    }

    /// Spectral density J(w) = alpha w^3 exp(-w/omega_c) for w > 0.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        self.alpha * omega.powi(3) * (-omega / self.omega_c).exp()
    }

    /// Cross-correlation kernel F(w/mu) of the two site couplings.
    ///
    /// In d = 1, 2, 3 the angular average over mode directions gives
    /// cos, J0, and sinc of w/mu respectively. F(0) = 1 in every dimension.
    pub fn spatial_kernel(&self, omega: f64) -> f64 {
        match self.mu {
            Mu::Infinite => 1.0,
            Mu::Zero => {
                if omega == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Mu::Finite(mu) => {
                let x = omega / mu;
                match self.dimension {
                    1 => x.cos(),
                    2 => crate::mathkit::bessel_j0(x),
                    _ => sinc(x),
                }
            }
        }
    }

    /// Weight of the anticorrelated fluctuations, J(w)/w^2 * (1 - F(w/mu)).
    /// This combination drives every dressed quantity in the model.
    pub fn exchange_weight(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        self.spectral_density(omega) / (omega * omega) * (1.0 - self.spatial_kernel(omega))
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Temperature of the phonon field, kept together with its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub temperature: f64,
    pub beta: f64,
}

impl ThermalState {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::InvalidModel(format!(
                "temperature must be positive and finite, got {temperature}"
            )));
        }
        Ok(ThermalState {
            temperature,
            beta: 1.0 / temperature,
        })
    }

    /// coth(beta w / 2), the symmetrized occupation factor.
    pub fn coth_half(&self, omega: f64) -> f64 {
        1.0 / (0.5 * self.beta * omega).tanh()
    }
}

/// Polaron dressing factor from direct quadrature of
///
///   B = exp[ - int_0^inf dw J(w)/w^2 (1 - F(w/mu)) coth(beta w / 2) ]
///
/// valid in every dimension. The integrand tends to 2 alpha / beta times
/// (1 - F) as w -> 0 and decays exponentially past the cutoff.
pub fn dressing_factor_quadrature(
    bath: &BathModel,
    thermal: &ThermalState,
    tol: f64,
) -> Result<f64> {
    bath.validate()?;
    if bath.mu == Mu::Infinite {
        return Ok(1.0);
    }
    let beta = thermal.beta;
    let integrand = |w: f64| {
        if w <= 0.0 {
            return 0.0;
        }
        bath.exchange_weight(w) * thermal.coth_half(w)
    };
    let exponent = integrate_semi_infinite(integrand, bath.omega_c.max(1.0 / beta), tol)?;
    Ok((-exponent.value).exp())
}

/// The two factors of the closed-form dressing exponent in three dimensions:
/// a temperature-independent lattice part and a thermal part,
///
///   B = B_static * B_thermal.
///
/// The static part integrates the zero-point weight alone:
///
///   B_static = exp[ - alpha omega_c^2 r^2 / (1 + r^2) ],   r = omega_c / mu,
///
/// and the thermal part resums the occupation factor into harmonic numbers
/// of complex argument and a trigamma term.
pub fn dressing_factor_split(bath: &BathModel, thermal: &ThermalState) -> Result<(f64, f64)> {
    bath.validate()?;
    if bath.dimension != 3 {
        return Err(Error::AnalyticNeedsD3(bath.dimension));
    }
    if bath.mu == Mu::Infinite {
        return Ok((1.0, 1.0));
    }
    let t = thermal.temperature;
    let y_inv = t / bath.omega_c;
    let a2 = bath.alpha * t * t;

    let r2 = match bath.mu {
        Mu::Zero => 1.0,
        Mu::Finite(mu) => {
            let r = bath.omega_c / mu;
            r * r / (1.0 + r * r)
        }
        Mu::Infinite => unreachable!(),
    };
    let b_static = (-bath.alpha * bath.omega_c * bath.omega_c * r2).exp();

    let trigamma = polygamma(1, Complex::new(1.0 + y_inv, 0.0))?.re;
    let thermal_exponent = match bath.mu {
        Mu::Zero => -2.0 * a2 * trigamma,
        Mu::Finite(mu) => {
            // x compares the thermal frequency pi T to the travel scale mu
            let x = std::f64::consts::PI * t / mu;
            let h = harmonic_number(Complex::new(y_inv, x / std::f64::consts::PI))?;
            a2 * (2.0 * std::f64::consts::PI / x * h.im - 2.0 * trigamma)
        }
        Mu::Infinite => unreachable!(),
    };
    Ok((b_static, thermal_exponent.exp()))
}

/// Closed-form dressing factor in three dimensions; other dimensions fall
/// back to quadrature at the given tolerance on the exponent.
pub fn dressing_factor(bath: &BathModel, thermal: &ThermalState, tol: f64) -> Result<f64> {
    if bath.dimension == 3 {
        let (b0, bt) = dressing_factor_split(bath, thermal)?;
        Ok(b0 * bt)
    } else {
        dressing_factor_quadrature(bath, thermal, tol)
    }
}
