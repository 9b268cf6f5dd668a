//! `bath`: tabulate the environment in both domains — spectral density,
//! spatial kernel, and response rates over frequency; displacement phase
//! over time — plus a consistency file cross-checking closed forms against
//! direct quadrature.

use std::path::Path;
use std::time::Instant;

use duet_core::bath::dressing_factor;
use duet_core::correlations::Axis;
use duet_core::{Propagator, ResponseSet, ThermalState};
use rayon::prelude::*;

use crate::commands::{ensure_out_dir, map_core};
use crate::config::RunConfig;
use crate::manifest::{write_manifest, RunManifest, MANIFEST_FILE};
use crate::output::{float_field, write_table};
use crate::CliError;

const FREQUENCY_HEADER: [&str; 8] = [
    "omega",
    "spectral_density",
    "spatial_kernel",
    "exchange_weight",
    "gamma_xx",
    "gamma_yy",
    "shift_xx",
    "shift_yy",
];

const TIME_HEADER: [&str; 6] = [
    "tau",
    "phi_real",
    "phi_imag",
    "phi_sym",
    "phi_sym_check",
    "phi_sym_error",
];

const CHECKS_HEADER: [&str; 5] = [
    "temperature",
    "dressing_closed",
    "dressing_phase",
    "dressing_error",
    "max_phi_sym_error",
];

/// Tolerance for the cross-check quadratures when the config does not set
/// one; loose enough to keep tabulation quick, tight enough to expose a
/// genuinely wrong closed form.
const CHECK_TOL: f64 = 1e-8;

fn file_name(stem: &str, t: f64) -> String {
    format!("{stem}_t{}.csv", float_field(t).replace('-', "m"))
}

pub fn run(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    ensure_out_dir(out)?;

    let bath = config.bath_model();
    bath.validate().map_err(map_core)?;
    let tol = config.tolerance.unwrap_or(CHECK_TOL);
    let omegas = config.frequency.samples(bath.omega_c);
    let taus = config.time.samples();

    let mut files = Vec::new();
    let mut warnings = Vec::new();
    let mut checks = Vec::new();

    for temperature in config.temperature.values() {
        let thermal = ThermalState::new(temperature).map_err(map_core)?;
        let propagator = Propagator::new(bath, thermal).map_err(map_core)?;
        let responses = ResponseSet::with_tolerance(propagator, tol);

        // Frequency-domain table; grid points are independent.
        let mut failures = 0usize;
        let freq_rows: Vec<Vec<String>> = omegas
            .par_iter()
            .map(|&w| {
                let xx = responses.response(Axis::X, w);
                let yy = responses.response(Axis::Y, w);
                let (gx, sx) = match &xx {
                    Ok(r) => (r.gamma, r.shift),
                    Err(_) => (f64::NAN, f64::NAN),
                };
                let (gy, sy) = match &yy {
                    Ok(r) => (r.gamma, r.shift),
                    Err(_) => (f64::NAN, f64::NAN),
                };
                let failed = xx.is_err() || yy.is_err();
                (
                    failed,
                    vec![
                        float_field(w),
                        float_field(bath.spectral_density(w)),
                        float_field(bath.spatial_kernel(w)),
                        float_field(bath.exchange_weight(w)),
                        float_field(gx),
                        float_field(gy),
                        float_field(sx),
                        float_field(sy),
                    ],
                )
            })
            .collect::<Vec<(bool, Vec<String>)>>()
            .into_iter()
            .map(|(failed, row)| {
                if failed {
                    failures += 1;
                }
                row
            })
            .collect();
        if failures > 0 {
            warnings.push(format!(
                "T = {temperature}: {failures} of {} frequency points did not converge",
                omegas.len()
            ));
        }
        let freq_name = file_name("bath_frequency", temperature);
        write_table(&out.join(&freq_name), &FREQUENCY_HEADER, freq_rows)?;
        files.push(freq_name);

        // Time-domain table with the quadrature cross-check.
        let prop = responses.propagator();
        let time_rows: Vec<(f64, Vec<String>)> = taus
            .par_iter()
            .map(|&tau| {
                let phi = prop.phi(tau);
                let sym = prop.phi_sym(tau);
                let check = prop.phi_sym_numeric(tau, tol);
                let (re, im) = match &phi {
                    Ok(p) => (p.re, p.im),
                    Err(_) => (f64::NAN, f64::NAN),
                };
                let s = sym.as_ref().copied().unwrap_or(f64::NAN);
                let c = check.as_ref().copied().unwrap_or(f64::NAN);
                let err = (s - c).abs();
                (
                    err,
                    vec![
                        float_field(tau),
                        float_field(re),
                        float_field(im),
                        float_field(s),
                        float_field(c),
                        float_field(err),
                    ],
                )
            })
            .collect();
        let max_sym_err = if time_rows.iter().any(|(e, _)| e.is_nan()) {
            f64::NAN
        } else {
            time_rows.iter().fold(0.0f64, |m, (e, _)| m.max(*e))
        };
        let time_name = file_name("bath_time", temperature);
        write_table(
            &out.join(&time_name),
            &TIME_HEADER,
            time_rows.into_iter().map(|(_, r)| r),
        )?;
        files.push(time_name);

        // Dressing consistency: closed-form product vs the phase at tau = 0.
        let b_closed = dressing_factor(&bath, prop.thermal(), tol).map_err(map_core)?;
        let b_phase = prop.dressing();
        checks.push(vec![
            float_field(temperature),
            float_field(b_closed),
            float_field(b_phase),
            float_field((b_closed - b_phase).abs()),
            float_field(max_sym_err),
        ]);
        for w in responses.warnings() {
            warnings.push(format!("T = {temperature}: {w}"));
        }
    }

    write_table(&out.join("bath_checks.csv"), &CHECKS_HEADER, checks)?;
    files.push("bath_checks.csv".into());
    files.push(MANIFEST_FILE.to_string());

    let partial = warnings.iter().any(|w| w.contains("did not converge"));
    let manifest = RunManifest {
        command: "bath".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        files,
        runs: Vec::new(),
        warnings,
        wall_time_ms: started.elapsed().as_millis() as u64,
    };
    write_manifest(out, &manifest)?;

    if partial {
        return Err(CliError::PartialSweep(
            "some tabulation points did not converge; the tables carry nan rows".into(),
        ));
    }
    Ok(())
}
