use thiserror::Error;

/// Unified error type for the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("polygamma pole: argument {0} is a non-positive integer")]
    PolygammaPole(String),

    #[error("polygamma order {0} not supported (allowed: 1, 2, 3)")]
    PolygammaOrder(u32),

    #[error("hurwitz_zeta domain: need s > 1 and a > 0, got s = {s}, a = {a}")]
    HurwitzDomain { s: f64, a: f64 },

    #[error("harmonic number pole: {0} is a negative integer")]
    HarmonicPole(String),

    #[error("quadrature did not converge: error estimate {estimate:.3e} exceeds tolerance {tol:.3e} after {evaluations} evaluations")]
    QuadratureNoConverge {
        estimate: f64,
        tol: f64,
        evaluations: u64,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("spatial dimension {0} not supported (allowed: 1, 2, 3)")]
    UnsupportedDimension(u32),

    #[error("analytic propagator form needs a three-dimensional bath, got D = {0}")]
    AnalyticNeedsD3(u32),

    #[error("resonant builder needs epsilon = 0, got epsilon = {0}")]
    BiasNotZero(f64),

    #[error("high-temperature closed forms need a nonzero bias")]
    BiasZero,

    #[error("generator drift matrix is singular (|det| = {0:.3e}) with a nonzero constant term: no steady state")]
    SingularGenerator(f64),

    #[error("bloch vector is already in the lab frame")]
    AlreadyLabFrame,

    #[error("time integration stalled at t = {t:.6e} with step size {step:.3e}")]
    StiffIntegration { t: f64, step: f64 },

    #[error("weak-coupling oscillation frequency is imaginary: xi_w^2 = {0:.6e}")]
    ImaginaryWeakFrequency(f64),

    #[error("no crossover inside bracket [{lo}, {hi}]: {sign}")]
    NoCrossover { lo: f64, hi: f64, sign: String },

    #[error("crossover solver stalled: {0}")]
    CrossoverStalled(String),
}
