//! Run manifests: one JSON document per invocation describing what was
//! computed, from which configuration, into which files.
//!
//! Data files (CSV) are byte-identical across repeated runs; the manifest
//! carries the one intentionally varying field, `wall_time_ms`.

use std::path::Path;

use duet_core::bloch::Regime;
use duet_core::{Generator, ScaleDiagnostics};
use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    /// Data files written into the output directory, in creation order.
    pub files: Vec<String>,
    /// One entry per solved model (per temperature for dynamics).
    pub runs: Vec<RunTelemetry>,
    /// Messages that did not abort the run but deserve attention.
    pub warnings: Vec<String>,
    pub wall_time_ms: u64,
}

/// Derived quantities worth echoing for sanity checks: the dressing and
/// renormalized parameters, the perturbative smallness beta * V_R, and the
/// dimensionless scale ratios the regime approximations hinge on.
#[derive(Debug, Serialize)]
pub struct RunTelemetry {
    pub temperature: f64,
    pub regime: String,
    /// Lattice dressing factor B = exp(-phi(0)/2).
    pub dressing: f64,
    /// Dressing exponent phi(0).
    pub phi_zero: f64,
    /// Renormalized exchange V_R = B V.
    pub v_renorm: f64,
    /// Bloch precession frequency eta = sqrt(bias^2 + 4 V_R^2).
    pub eta: f64,
    /// Perturbative control parameter beta * V_R.
    pub beta_v_renorm: f64,
    /// Scale-separation ratio V / omega_c (small when the cutoff is fast).
    pub coupling_ratio: f64,
    /// Squared oscillation discriminant of the population mode, when the
    /// regime defines one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_squared: Option<f64>,
    pub scales: ScaleDiagnostics,
}

impl RunTelemetry {
    pub fn build(
        generator: &Generator,
        bath: &duet_core::BathModel,
        temperature: f64,
        regime: Regime,
    ) -> Self {
        let q = &generator.quantities;
        RunTelemetry {
            temperature,
            regime: regime.to_string(),
            dressing: q.dressing,
            phi_zero: -2.0 * q.dressing.ln(),
            v_renorm: q.v_renorm,
            eta: q.eta,
            beta_v_renorm: generator.beta * q.v_renorm,
            coupling_ratio: generator.system.coupling / bath.omega_c,
            xi_squared: generator.xi_squared(),
            scales: ScaleDiagnostics::at(bath, temperature),
        }
    }
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::Io(format!("serializing manifest: {e}")))?;
    std::fs::write(&path, text + "\n")
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    Ok(())
}
