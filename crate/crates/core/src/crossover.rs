//! Coherent/incoherent classification and the crossover temperature.
//!
//! On resonance the population difference oscillates while
//!
//! ```text
//! xi^2 = 8 V_R (2 V_R + lambda_3) - (Gamma_z - Gamma_y)^2
//! ```
//!
//! stays positive and relaxes monotonically once it turns negative. The
//! temperature where xi^2 crosses zero is the crossover temperature T_c.
//! Two solvers are provided: `solve_tc_full` roots xi^2(T) built from the
//! exact rates, and `solve_tc_approx` roots the analytic high-temperature
//! criterion
//!
//! ```text
//! T^2 = V B e^{phi0 C0} / (4 sqrt(2 pi^3 alpha C2))
//! ```
//!
//! obtained from the saddle-point form of the response kernels with the
//! energy shift lambda_3 dropped.

use crate::bath::{BathModel, Mu, Propagator, ThermalState};
use crate::bloch::{Generator, PolaronQuantities, Regime, SystemModel};
use crate::correlations::ResponseSet;
use crate::{Error, Result};
use serde::Serialize;

/// Temperature search window for the crossover solvers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Default for Bracket {
    fn default() -> Self {
        Bracket { lo: 0.2, hi: 100.0 }
    }
}

impl Bracket {
    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo <= 0.0 || self.hi <= self.lo {
            return Err(Error::InvalidModel(format!(
                "temperature bracket must satisfy 0 < lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// Which criterion produced a crossover temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    /// Root of xi^2(T) assembled from the exact one-sided response kernels.
    Full,
    /// Root of the analytic saddle-point criterion (lambda_3 dropped).
    Approximate,
}

/// Temperature scales and dimensionless arguments evaluated at the solution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScaleDiagnostics {
    /// T0 = 1 / (sqrt(2 alpha) pi): scale where multiphonon dressing sets in.
    pub quantum_temperature: f64,
    /// Tx = mu / pi: scale where spatial correlations thermally decouple
    /// (zero for uncorrelated sites, infinite for coinciding sites).
    pub correlation_temperature: f64,
    /// Ty = omega_c: scale where the cutoff stops mattering.
    pub cutoff_temperature: f64,
    /// phi0 = 2 pi^2 alpha T^2 at the solution; > 1 means multiphonon.
    pub phonon_exponent: f64,
    /// x = pi T / mu at the solution (infinite for uncorrelated sites).
    pub correlation_argument: f64,
    /// y = omega_c / T at the solution.
    pub cutoff_argument: f64,
}

impl ScaleDiagnostics {
    /// Evaluate every scale and argument for the given bath at `temperature`.
    pub fn at(bath: &BathModel, temperature: f64) -> Self {
        use std::f64::consts::PI;
        let (corr_temp, corr_arg) = match bath.mu {
            Mu::Zero => (0.0, f64::INFINITY),
            Mu::Finite(m) => (m / PI, PI * temperature / m),
            Mu::Infinite => (f64::INFINITY, 0.0),
        };
        ScaleDiagnostics {
            quantum_temperature: 1.0 / ((2.0 * bath.alpha).sqrt() * PI),
            correlation_temperature: corr_temp,
            cutoff_temperature: bath.omega_c,
            phonon_exponent: 2.0 * PI * PI * bath.alpha * temperature * temperature,
            correlation_argument: corr_arg,
            cutoff_argument: bath.omega_c / temperature,
        }
    }
}

/// A solved crossover temperature with its residual and context.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrossoverResult {
    /// Crossover temperature (same units as every other energy here).
    pub temperature: f64,
    pub method: SolveMethod,
    /// Search window the root was isolated in.
    pub bracket: (f64, f64),
    /// |criterion| at the returned temperature: |xi^2| for the full solver,
    /// |T^2 - rhs(T)| for the approximate one.
    pub residual: f64,
    pub diagnostics: ScaleDiagnostics,
}

/// Regime of the resonant dynamics at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum Classification {
    /// xi^2 > 0: damped oscillations in the population difference.
    Coherent { xi_squared: f64 },
    /// xi^2 < 0: monotone relaxation.
    Incoherent { xi_squared: f64 },
    /// |xi^2| below resolution: critically damped.
    Boundary { xi_squared: f64 },
    /// Biased system: no strict criterion exists; carries the weight
    /// 4 V_R^2 / eta^2 of the oscillatory component of the population
    /// difference instead (small weight means barely visible oscillations).
    OffResonant { amplitude_weight: f64 },
}

const PRESCAN_POINTS: usize = 32;
/// Relative tolerance on the solved temperature.
const TEMPERATURE_REL_TOL: f64 = 1e-6;
/// Residual acceptance as a fraction of the criterion's natural scale.
const RESIDUAL_FRAC: f64 = 1e-8;
const MAX_REFINE: usize = 90;
/// |xi^2| below this is reported as the boundary classification.
const BOUNDARY_BAND: f64 = 1e-10;

/// xi^2 at one temperature, built from the exact resonant rates.
pub fn xi_squared(system: &SystemModel, bath: &BathModel, temperature: f64) -> Result<f64> {
    let (xi2, _) = criterion_full(system, bath, temperature)?;
    Ok(xi2)
}

/// Returns (xi^2, scale) where scale = 16 V_R^2 is the magnitude both
/// competing terms share at the root; residuals are judged against it.
fn criterion_full(system: &SystemModel, bath: &BathModel, temperature: f64) -> Result<(f64, f64)> {
    let thermal = ThermalState::new(temperature)?;
    let propagator = Propagator::new(bath.clone(), thermal)?;
    let responses = ResponseSet::new(propagator);
    let generator = Generator::build(Regime::Resonant, system, &responses)?;
    let vr = generator.quantities.v_renorm;
    let xi2 = generator
        .xi_squared()
        .expect("resonant generator always carries xi^2");
    Ok((xi2, 16.0 * vr * vr))
}

/// Crossover temperature from the exact resonant criterion xi^2(T) = 0.
///
/// A log-spaced prescan walks the bracket until xi^2 changes sign; the root
/// is then polished by bisection with secant acceleration until the
/// temperature is converged to relative 1e-6 and the residual is negligible
/// against 16 V_R^2.
pub fn solve_tc_full(
    system: &SystemModel,
    bath: &BathModel,
    bracket: Bracket,
) -> Result<CrossoverResult> {
    system.validate()?;
    bath.validate()?;
    bracket.validate()?;
    if system.bias != 0.0 {
        return Err(Error::BiasNotZero(system.bias));
    }
    let f = |t: f64| criterion_full(system, bath, t);
    let (t_c, residual) = bracketed_root(
        &f,
        bracket,
        ScanDirection::Upward,
        (
            "xi^2 stayed positive (coherent everywhere) across the whole prescan",
            "xi^2 stayed negative (incoherent everywhere) across the whole prescan",
        ),
    )?;
    Ok(CrossoverResult {
        temperature: t_c,
        method: SolveMethod::Full,
        bracket: (bracket.lo, bracket.hi),
        residual,
        diagnostics: ScaleDiagnostics::at(bath, t_c),
    })
}

/// Log form of the analytic criterion: ln T^2 - ln rhs(T), with unit
/// residual scale. Working in logs keeps the evaluation finite where the
/// dressing underflows and the multiphonon exponential overflows.
fn criterion_approx(
    system: &SystemModel,
    bath: &BathModel,
    temperature: f64,
) -> Result<(f64, f64)> {
    use std::f64::consts::PI;
    let thermal = ThermalState::new(temperature)?;
    let propagator = Propagator::new(bath.clone(), thermal)?;
    let sc = propagator.saddle_coefficients()?;
    if sc.c2 <= 0.0 {
        return Err(Error::CrossoverStalled(format!(
            "saddle curvature is non-positive (c2 = {:.3e}) at T = {temperature}",
            sc.c2
        )));
    }
    let ln_rhs = system.coupling.ln() - 0.5 * propagator.phi_zero() + sc.peak()
        - (4.0 * (2.0 * PI.powi(3) * bath.alpha * sc.c2).sqrt()).ln();
    Ok((2.0 * temperature.ln() - ln_rhs, 1.0))
}

/// Crossover temperature from the analytic high-temperature criterion.
///
/// Roots T^2 = V B e^{phi0 C0} / (4 sqrt(2 pi^3 alpha C2)) on a log
/// temperature grid; every factor on the right depends on T through the
/// dressing and the saddle coefficients, so this is a genuine fixed-point
/// condition, not a quadratic.
pub fn solve_tc_approx(
    system: &SystemModel,
    bath: &BathModel,
    bracket: Bracket,
) -> Result<CrossoverResult> {
    system.validate()?;
    bath.validate()?;
    bracket.validate()?;
    if system.bias != 0.0 {
        return Err(Error::BiasNotZero(system.bias));
    }
    if bath.dimension != 3 {
        return Err(Error::AnalyticNeedsD3(bath.dimension));
    }
    if bath.mu == Mu::Infinite {
        // Coinciding sites: the fluctuations cancel, the criterion's right
        // side diverges, and every temperature sits on the coherent side.
        return Err(Error::NoCrossover {
            lo: bracket.lo,
            hi: bracket.hi,
            sign: "the analytic criterion stayed on the coherent side across \
                   the whole prescan (decoherence-free environment)"
                .into(),
        });
    }
    // The saddle criterion is a high-temperature form; far below the
    // multiphonon scale it can develop spurious roots. Scanning from the hot
    // end isolates the physically meaningful crossing.
    let f = |t: f64| criterion_approx(system, bath, t);
    let (t_c, residual) = bracketed_root(
        &f,
        bracket,
        ScanDirection::Downward,
        (
            "the analytic criterion stayed on the incoherent side across the whole prescan",
            "the analytic criterion stayed on the coherent side across the whole prescan",
        ),
    )?;
    Ok(CrossoverResult {
        temperature: t_c,
        method: SolveMethod::Approximate,
        bracket: (bracket.lo, bracket.hi),
        residual,
        diagnostics: ScaleDiagnostics::at(bath, t_c),
    })
}

/// Classify the dynamics at one temperature.
///
/// Resonant systems are classified by the sign of xi^2. Biased systems get
/// the structured refusal [`Classification::OffResonant`]: the population
/// difference always mixes an oscillatory part of weight 4 V_R^2 / eta^2
/// with a monotone part, so no sharp criterion exists and the weight itself
/// is the useful diagnostic.
pub fn classify(
    system: &SystemModel,
    bath: &BathModel,
    temperature: f64,
) -> Result<Classification> {
    system.validate()?;
    bath.validate()?;
    if system.bias != 0.0 {
        let thermal = ThermalState::new(temperature)?;
        let propagator = Propagator::new(bath.clone(), thermal)?;
        let q = PolaronQuantities::compute(system, propagator.dressing());
        let weight = if q.eta > 0.0 {
            (2.0 * q.v_renorm / q.eta).powi(2)
        } else {
            0.0
        };
        return Ok(Classification::OffResonant {
            amplitude_weight: weight,
        });
    }
    let xi2 = xi_squared(system, bath, temperature)?;
    Ok(if xi2.abs() < BOUNDARY_BAND {
        Classification::Boundary { xi_squared: xi2 }
    } else if xi2 > 0.0 {
        Classification::Coherent { xi_squared: xi2 }
    } else {
        Classification::Incoherent { xi_squared: xi2 }
    })
}

#[derive(Clone, Copy, PartialEq)]
enum ScanDirection {
    Upward,
    Downward,
}

/// Walk a log-spaced grid over the bracket until the criterion changes sign,
/// then polish the root. Returns (root, |residual|). The walk stops at the
/// first sign change seen from the chosen end, which selects the coldest
/// (upward) or hottest (downward) crossing when several exist.
fn bracketed_root<F>(
    f: &F,
    bracket: Bracket,
    direction: ScanDirection,
    sign_labels: (&str, &str),
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let ratio = bracket.hi / bracket.lo;
    let grid = |k: usize| bracket.lo * ratio.powf(k as f64 / (PRESCAN_POINTS - 1) as f64);
    let index = |step: usize| match direction {
        ScanDirection::Upward => step,
        ScanDirection::Downward => PRESCAN_POINTS - 1 - step,
    };
    let mut prev_t = grid(index(0));
    let (mut prev_v, mut prev_scale) = f(prev_t)?;
    if prev_v == 0.0 {
        return Ok((prev_t, 0.0));
    }
    for step in 1..PRESCAN_POINTS {
        let t = grid(index(step));
        let (v, scale) = f(t)?;
        if v == 0.0 {
            return Ok((t, 0.0));
        }
        if v.signum() != prev_v.signum() {
            let (a, fa, b, fb) = if t < prev_t {
                (t, v, prev_t, prev_v)
            } else {
                (prev_t, prev_v, t, v)
            };
            return refine(f, a, fa, b, fb, prev_scale.max(scale));
        }
        prev_t = t;
        prev_v = v;
        prev_scale = scale;
    }
    let sign = if prev_v > 0.0 {
        sign_labels.0
    } else {
        sign_labels.1
    };
    Err(Error::NoCrossover {
        lo: bracket.lo,
        hi: bracket.hi,
        sign: sign.to_string(),
    })
}

/// Bisection with secant acceleration on a sign-changing interval.
fn refine<F>(f: &F, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64, scale: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    debug_assert!(fa.signum() != fb.signum());
    let target = RESIDUAL_FRAC * scale.max(f64::MIN_POSITIVE);
    let mut best = (0.5 * (a + b), f64::INFINITY);
    for iter in 0..MAX_REFINE {
        let mid = 0.5 * (a + b);
        // secant proposal once the interval is already narrow; bisection
        // first so the secant always starts from a nearly linear stretch
        let narrow = (b - a) <= 0.05 * mid;
        let mut c = if narrow {
            b - fb * (b - a) / (fb - fa)
        } else {
            mid
        };
        if !c.is_finite() || c <= a || c >= b {
            c = mid;
        }
        let (fc, _) = f(c)?;
        if fc.abs() < best.1 {
            best = (c, fc.abs());
        }
        let interval_done = (b - a) <= TEMPERATURE_REL_TOL * c.abs();
        if fc == 0.0 || (interval_done && fc.abs() <= target) {
            return Ok((c, fc.abs()));
        }
        if interval_done && iter + 1 == MAX_REFINE {
            break;
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
        } else {
            b = c;
            fb = fc;
        }
    }
    // The interval converged but the residual floor stayed above target:
    // accept only if it is still small against the scale.
    if best.1 <= 100.0 * target {
        return Ok(best);
    }
    Err(Error::CrossoverStalled(format!(
        "residual {:.3e} did not reach {:.3e} on [{a}, {b}]",
        best.1, target
    )))
}
