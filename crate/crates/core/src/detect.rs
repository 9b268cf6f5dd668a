//! Trajectory shape diagnostics.
//!
//! Damped-oscillatory transfer shows up as extrema in the population
//! difference: the discrete derivative keeps flipping sign. Monotonic
//! (rate-equation-like) decay has none. Counting strict sign flips after a
//! short transient, with a deadband that mutes round-off wiggle near the
//! flat tail, separates the two robustly on sampled data.

/// Samples earlier than this are ignored, so the initial slip out of the
/// prepared state cannot register as an extremum.
pub const DEFAULT_TRANSIENT: f64 = 1.0;

/// Derivatives (or values) below this fraction of the window peak count as
/// zero and never contribute a sign.
pub const DEFAULT_DEADBAND: f64 = 1e-4;

/// Count strict sign alternations of the discrete derivative of `values`
/// over `times`, ignoring samples before `transient` and derivative
/// magnitudes below `deadband` times the window's peak derivative.
pub fn derivative_sign_changes(
    times: &[f64],
    values: &[f64],
    transient: f64,
    deadband: f64,
) -> usize {
    let derivs: Vec<f64> = times
        .windows(2)
        .zip(values.windows(2))
        .filter(|(t, _)| t[0] >= transient && t[1] > t[0])
        .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
        .collect();
    alternations(&derivs, deadband)
}

/// Count sign alternations of the values themselves (zero crossings),
/// with the same transient and relative-deadband conventions.
pub fn zero_crossings(times: &[f64], values: &[f64], transient: f64, deadband: f64) -> usize {
    let kept: Vec<f64> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= transient)
        .map(|(_, v)| *v)
        .collect();
    alternations(&kept, deadband)
}

fn alternations(series: &[f64], deadband: f64) -> usize {
    let peak = series.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return 0;
    }
    let floor = deadband * peak;
    let mut count = 0;
    let mut last_sign = 0i8;
    for &x in series {
        if x.abs() <= floor {
            continue;
        }
        let sign = if x > 0.0 { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            count += 1;
        }
        last_sign = sign;
    }
    count
}

/// Coarse verdict on a population-difference trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferCharacter {
    /// At least two extrema after the transient: damped oscillation.
    Coherent,
    /// No extremum: monotone relaxation.
    Incoherent,
    /// Exactly one extremum: a single overshoot, near the boundary.
    Ambiguous,
}

impl TransferCharacter {
    pub fn as_str(self) -> &'static str {
        match self {
            TransferCharacter::Coherent => "coherent",
            TransferCharacter::Incoherent => "incoherent",
            TransferCharacter::Ambiguous => "ambiguous",
        }
    }
}

/// Classify a sampled population-difference trace with default transient
/// and deadband.
pub fn classify_trajectory(times: &[f64], values: &[f64]) -> TransferCharacter {
    match derivative_sign_changes(times, values, DEFAULT_TRANSIENT, DEFAULT_DEADBAND) {
        0 => TransferCharacter::Incoherent,
        1 => TransferCharacter::Ambiguous,
        _ => TransferCharacter::Coherent,
    }
}
