//! Numerical kernels shared by the physics modules: complex digamma and
//! polygamma functions, the Hurwitz zeta function, Bessel J0, adaptive
//! Gauss-Kronrod quadrature, and an accelerated half-line Fourier transform.

mod bessel;
mod fourier;
mod polygamma;
mod quad;
mod zeta;

pub use bessel::bessel_j0;
pub use fourier::{fourier_halfline, fourier_halfline_real, HalfLineTransform};
pub use polygamma::{digamma, harmonic_number, polygamma, EULER_GAMMA};
pub(crate) use polygamma::polygamma_any;
pub use quad::{integrate, integrate_semi_infinite, QuadratureResult};
pub use zeta::hurwitz_zeta;

/// Complex double-precision scalar used throughout the crate.
pub type Complex = num_complex::Complex64;
