//! Polaron-frame dynamics of a driven two-site excitation exchange coupled
//! to a bosonic environment with spatially correlated fluctuations.
//!
//! The crate models a donor/acceptor pair exchanging one excitation while
//! both sites couple to the same phonon field. In the polaron frame the
//! exchange amplitude is dressed by the lattice distortion; the remaining
//! fluctuations enter through two-time correlation functions whose half-line
//! Fourier transforms set the relaxation rates of a 3-component Bloch
//! equation. The modules build on each other bottom-up:
//!
//! - [`mathkit`]: special functions and quadrature kernels.
//! - [`bath`]: spectral density, spatial correlation kernel, dressing factor,
//!   and the lattice displacement propagator.
//! - [`correlations`]: dressed fluctuation correlators and their transforms.
//! - [`bloch`]: relaxation-rate sets and the Bloch generator in several
//!   regimes of validity.
//! - [`dynamics`]: propagation of the Bloch vector and closed-form solutions.
//! - [`crossover`]: the temperature separating damped-oscillatory from
//!   monotonic population transfer.
//! - [`detect`]: shape diagnostics for sampled trajectories.
//!
//! Internal units set hbar = k_B = 1 and measure energies in units of the
//! lattice frequency scale.

pub mod bath;
pub mod bloch;
pub mod correlations;
pub mod crossover;
pub mod detect;
pub mod dynamics;
mod error;
pub mod mathkit;

pub use bath::{BathModel, Mu, Propagator, SaddleCoefficients, ThermalState};
pub use bloch::{Generator, PolaronQuantities, RateSet, Regime, SystemModel};
pub use correlations::{Axis, Response, ResponseSample, ResponseSet, SaddleEstimate};
pub use crossover::{Bracket, Classification, CrossoverResult, ScaleDiagnostics, SolveMethod};
pub use detect::TransferCharacter;
pub use dynamics::{BlochTrajectory, BlochVector, ExpansionOrder, Frame};
pub use error::Error;
pub use mathkit::{Complex, QuadratureResult};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
