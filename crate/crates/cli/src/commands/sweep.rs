//! `sweep`: solve the dynamics over a cartesian parameter grid and reduce
//! each point to summary observables: generator spectrum, steady state,
//! oscillation discriminant, amplitude weight, and trajectory shape. One
//! CSV row per grid point; individual points may fail without sinking the
//! run — failures land in the status/error columns and turn the exit into
//! "partial".

use std::path::Path;
use std::time::Instant;

use duet_core::detect::{
    classify_trajectory, derivative_sign_changes, DEFAULT_DEADBAND, DEFAULT_TRANSIENT,
};
use duet_core::dynamics::{donor_start, eigen_frequencies, evolve, steady_state};
use duet_core::{BathModel, BlochVector, Mu, SystemModel};
use rayon::prelude::*;

use crate::commands::{ensure_out_dir, map_core, solve_point};
use crate::config::{RunConfig, SweepSection};
use crate::manifest::{write_manifest, RunManifest, MANIFEST_FILE};
use crate::output::{float_field, write_table};
use crate::CliError;

pub const SWEEP_FILE: &str = "sweep.csv";

const HEADER: [&str; 27] = [
    "index",
    "temperature",
    "alpha",
    "omega_c",
    "mu",
    "bias",
    "coupling",
    "regime",
    "dressing",
    "v_renorm",
    "eta",
    "xi_squared",
    "amplitude_weight",
    "eig1_re",
    "eig1_im",
    "eig2_re",
    "eig2_im",
    "eig3_re",
    "eig3_im",
    "steady_x",
    "steady_y",
    "steady_z",
    "character",
    "extrema",
    "final_population",
    "status",
    "error",
];

#[derive(Clone, Copy)]
struct GridPoint {
    temperature: f64,
    alpha: f64,
    omega_c: f64,
    mu: Mu,
    bias: f64,
    coupling: f64,
}

/// Cartesian product in a fixed row-major order: temperature slowest, then
/// alpha, omega_c, mu, bias, coupling.
fn grid(config: &RunConfig, section: &SweepSection) -> Vec<GridPoint> {
    let ts = section
        .temperature
        .clone()
        .unwrap_or_else(|| config.temperature.values());
    let alphas = section.alpha.clone().unwrap_or(vec![config.bath.alpha]);
    let omega_cs = section.omega_c.clone().unwrap_or(vec![config.bath.omega_c]);
    let mus = section.mu.clone().unwrap_or(vec![config.bath.mu]);
    let biases = section.bias.clone().unwrap_or(vec![config.system.bias]);
    let couplings = section
        .coupling
        .clone()
        .unwrap_or(vec![config.system.coupling]);

    let mut points = Vec::new();
    for &temperature in &ts {
        for &alpha in &alphas {
            for &omega_c in &omega_cs {
                for &mu in &mus {
                    for &bias in &biases {
                        for &coupling in &couplings {
                            points.push(GridPoint {
                                temperature,
                                alpha,
                                omega_c,
                                mu,
                                bias,
                                coupling,
                            });
                        }
                    }
                }
            }
        }
    }
    points
}

struct RowData {
    regime: String,
    dressing: f64,
    v_renorm: f64,
    eta: f64,
    xi_squared: Option<f64>,
    /// Oscillatory share of the population difference, 4 V_R^2 / eta^2.
    amplitude_weight: f64,
    /// Generator eigenvalues sorted by (re, im) for reproducible output.
    eigenvalues: [(f64, f64); 3],
    steady: BlochVector,
    character: &'static str,
    extrema: usize,
    final_population: f64,
}

fn solve_row(point: &GridPoint, config: &RunConfig, times: &[f64]) -> Result<RowData, CliError> {
    let system = SystemModel::new(point.bias, point.coupling).map_err(map_core)?;
    let bath = BathModel {
        alpha: point.alpha,
        omega_c: point.omega_c,
        mu: point.mu,
        dimension: config.bath.dimension,
    };
    let solved = solve_point(&system, &bath, point.temperature, config.regime, config.tolerance)?;
    let initial = match config.initial {
        Some([x, y, z]) => BlochVector::new(x, y, z),
        None => donor_start(),
    };
    let trajectory = evolve(&solved.generator, initial, times).map_err(map_core)?;
    let population = trajectory.population();
    let steady = steady_state(&solved.generator)
        .unwrap_or_else(|_| BlochVector::new(f64::NAN, f64::NAN, f64::NAN));

    let mut eigenvalues: [(f64, f64); 3] = eigen_frequencies(solved.generator.matrix())
        .map_err(map_core)?
        .map(|z| (z.re, z.im));
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));

    let q = &solved.generator.quantities;
    let amplitude_weight = if q.eta > 0.0 {
        let w = 2.0 * q.v_renorm / q.eta;
        w * w
    } else {
        f64::NAN
    };

    Ok(RowData {
        regime: solved.regime.to_string(),
        dressing: q.dressing,
        v_renorm: q.v_renorm,
        eta: q.eta,
        xi_squared: solved.generator.xi_squared(),
        amplitude_weight,
        eigenvalues,
        steady,
        character: classify_trajectory(times, &population).as_str(),
        extrema: derivative_sign_changes(times, &population, DEFAULT_TRANSIENT, DEFAULT_DEADBAND),
        final_population: *population.last().unwrap(),
    })
}

pub fn run(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    ensure_out_dir(out)?;

    let section = config.sweep.as_ref().ok_or_else(|| {
        CliError::Config("the sweep command needs a \"sweep\" config section".into())
    })?;
    let points = grid(config, section);
    let times = config.time.samples();

    let outcomes: Vec<Result<RowData, CliError>> = points
        .par_iter()
        .map(|p| solve_row(p, config, &times))
        .collect();

    let mut rows = Vec::with_capacity(points.len());
    let mut failures = 0usize;
    for (i, (point, outcome)) in points.iter().zip(&outcomes).enumerate() {
        let mut row = vec![
            i.to_string(),
            float_field(point.temperature),
            float_field(point.alpha),
            float_field(point.omega_c),
            point.mu.to_string(),
            float_field(point.bias),
            float_field(point.coupling),
        ];
        match outcome {
            Ok(d) => {
                row.push(d.regime.clone());
                row.extend(
                    [d.dressing, d.v_renorm, d.eta]
                        .into_iter()
                        .map(float_field),
                );
                row.push(float_field(d.xi_squared.unwrap_or(f64::NAN)));
                row.push(float_field(d.amplitude_weight));
                for (re, im) in d.eigenvalues {
                    row.push(float_field(re));
                    row.push(float_field(im));
                }
                row.extend([d.steady[0], d.steady[1], d.steady[2]].into_iter().map(float_field));
                row.push(d.character.to_string());
                row.push(d.extrema.to_string());
                row.push(float_field(d.final_population));
                row.push("ok".to_string());
                row.push(String::new());
            }
            Err(e) => {
                failures += 1;
                row.push(String::new());
                row.extend(std::iter::repeat_n(float_field(f64::NAN), 14));
                row.push(String::new());
                row.push(String::new());
                row.push(float_field(f64::NAN));
                row.push("failed".to_string());
                row.push(e.message().to_string());
            }
        }
        rows.push(row);
    }

    write_table(&out.join(SWEEP_FILE), &HEADER, rows)?;

    let warnings: Vec<String> = if failures > 0 {
        vec![format!("{failures} of {} grid points failed", points.len())]
    } else {
        Vec::new()
    };
    let manifest = RunManifest {
        command: "sweep".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        files: vec![SWEEP_FILE.to_string(), MANIFEST_FILE.to_string()],
        runs: Vec::new(),
        warnings,
        wall_time_ms: started.elapsed().as_millis() as u64,
    };
    write_manifest(out, &manifest)?;

    if failures == points.len() {
        let first = outcomes
            .iter()
            .find_map(|o| o.as_ref().err())
            .map(|e| e.message().to_string())
            .unwrap_or_default();
        return Err(CliError::Numerical(format!(
            "every grid point failed (first: {first})"
        )));
    }
    if failures > 0 {
        return Err(CliError::PartialSweep(format!(
            "{failures} of {} grid points failed; see {SWEEP_FILE}",
            points.len()
        )));
    }
    Ok(())
}
