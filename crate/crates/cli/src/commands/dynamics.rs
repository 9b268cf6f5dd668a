//! `dynamics`: solve the Bloch equation on a time grid, one trajectory CSV
//! per temperature, plus a manifest with derived quantities.

use std::path::Path;
use std::time::Instant;

use duet_core::dynamics::{donor_start, evolve};
use duet_core::BlochVector;

use crate::commands::{ensure_out_dir, map_core, solve_point};
use crate::config::RunConfig;
use crate::manifest::{write_manifest, RunManifest, RunTelemetry, MANIFEST_FILE};
use crate::output::{trajectory_file_name, trajectory_rows, write_table, TRAJECTORY_HEADER};
use crate::CliError;

pub fn run(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    ensure_out_dir(out)?;

    let system = config.system_model()?;
    let bath = config.bath_model();
    let times = config.time.samples();
    let initial: BlochVector = match config.initial {
        Some([x, y, z]) => BlochVector::new(x, y, z),
        None => donor_start(),
    };

    let mut files = Vec::new();
    let mut runs = Vec::new();
    let mut warnings = Vec::new();

    for temperature in config.temperature.values() {
        let point = solve_point(&system, &bath, temperature, config.regime, config.tolerance)?;
        let trajectory = evolve(&point.generator, initial, &times).map_err(map_core)?;

        // Positivity monitor: the population difference of a physical state
        // stays inside [-1, 1]; a small overshoot is logged, not fatal.
        let worst = trajectory
            .population()
            .into_iter()
            .fold(0.0f64, |m, z| m.max(z.abs()));
        if worst > 1.0 + 1e-6 {
            warnings.push(format!(
                "T = {temperature}: |alpha_z| reached {worst:.6}, outside the Bloch ball"
            ));
        }

        let name = trajectory_file_name(temperature);
        write_table(
            &out.join(&name),
            &TRAJECTORY_HEADER,
            trajectory_rows(&trajectory),
        )?;
        files.push(name);

        runs.push(RunTelemetry::build(
            &point.generator,
            &bath,
            temperature,
            point.regime,
        ));
        for w in point.warnings {
            warnings.push(format!("T = {temperature}: {w}"));
        }
    }

    files.push(MANIFEST_FILE.to_string());
    let manifest = RunManifest {
        command: "dynamics".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        files,
        runs,
        warnings,
        wall_time_ms: started.elapsed().as_millis() as u64,
    };
    write_manifest(out, &manifest)
}
