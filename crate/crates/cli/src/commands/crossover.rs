//! `crossover`: trace the coherent/incoherent boundary temperature across a
//! parameter sweep. Each row carries the sweep value, both solutions (exact
//! criterion and analytic approximation) with residuals, and the temperature
//! scales that say which physics governs the result. Points where the
//! criterion never changes sign are recorded as sentinel rows and the run
//! continues.

use std::path::Path;
use std::time::Instant;

use duet_core::crossover::{solve_tc_approx, solve_tc_full};
use duet_core::{BathModel, Bracket, CrossoverResult, Mu, ScaleDiagnostics};
use rayon::prelude::*;

use crate::commands::{ensure_out_dir, map_core};
use crate::config::{CrossoverAxis, RunConfig};
use crate::manifest::{write_manifest, RunManifest, MANIFEST_FILE};
use crate::output::{float_field, write_table};
use crate::CliError;

pub const CROSSOVER_FILE: &str = "crossover.csv";

const HEADER: [&str; 18] = [
    "value",
    "omega_c",
    "mu",
    "inv_mu",
    "tc_full",
    "residual_full",
    "tc_approx",
    "residual_approx",
    "quantum_temperature",
    "correlation_temperature",
    "cutoff_temperature",
    "phi0_full",
    "x_full",
    "y_full",
    "phi0_approx",
    "status_full",
    "status_approx",
    "detail",
];

type Solved = Result<CrossoverResult, duet_core::Error>;

struct Row {
    value: f64,
    bath: BathModel,
    full: Solved,
    approx: Solved,
}

/// Sentinels are answers ("no boundary in the bracket, and here is which
/// side the whole bracket sits on"); only other errors count as failures.
fn status(outcome: &Solved) -> (&'static str, Option<String>) {
    match outcome {
        Ok(_) => ("ok", None),
        Err(duet_core::Error::NoCrossover { sign, .. }) => {
            if sign.contains("incoherent") {
                ("incoherent-everywhere", Some(sign.clone()))
            } else {
                ("coherent-everywhere", Some(sign.clone()))
            }
        }
        Err(e) => ("failed", Some(e.to_string())),
    }
}

impl Row {
    fn to_record(&self) -> Vec<String> {
        let (status_full, detail_full) = status(&self.full);
        let (status_approx, detail_approx) = status(&self.approx);
        let (tc_f, res_f, phi0_f, x_f, y_f) = match &self.full {
            Ok(r) => (
                r.temperature,
                r.residual,
                r.diagnostics.phonon_exponent,
                r.diagnostics.correlation_argument,
                r.diagnostics.cutoff_argument,
            ),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN),
        };
        let (tc_a, res_a, phi0_a) = match &self.approx {
            Ok(r) => (r.temperature, r.residual, r.diagnostics.phonon_exponent),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        };
        // Temperature-independent scales; any probe temperature works.
        let scales = ScaleDiagnostics::at(&self.bath, 1.0);
        let detail = match (detail_full, detail_approx) {
            (None, None) => String::new(),
            (Some(f), None) => format!("full: {f}"),
            (None, Some(a)) => format!("approx: {a}"),
            (Some(f), Some(a)) => format!("full: {f} | approx: {a}"),
        };
        vec![
            float_field(self.value),
            float_field(self.bath.omega_c),
            self.bath.mu.to_string(),
            float_field(self.bath.mu.inverse()),
            float_field(tc_f),
            float_field(res_f),
            float_field(tc_a),
            float_field(res_a),
            float_field(scales.quantum_temperature),
            float_field(scales.correlation_temperature),
            float_field(scales.cutoff_temperature),
            float_field(phi0_f),
            float_field(x_f),
            float_field(y_f),
            float_field(phi0_a),
            status_full.to_string(),
            status_approx.to_string(),
            detail,
        ]
    }

    fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (method, outcome) in [("full", &self.full), ("approximate", &self.approx)] {
            if status(outcome).0 == "failed" {
                out.push(format!(
                    "{method} solve failed at omega_c = {}, mu = {}: {}",
                    self.bath.omega_c,
                    self.bath.mu,
                    status(outcome).1.unwrap_or_default()
                ));
            }
        }
        out
    }
}

pub fn run(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    ensure_out_dir(out)?;

    let section = config.crossover.as_ref().ok_or_else(|| {
        CliError::Config("the crossover command needs a \"crossover\" config section".into())
    })?;
    let system = config.system_model()?;
    if system.bias != 0.0 {
        return Err(CliError::Config(format!(
            "the crossover boundary is defined on resonance; got bias = {} \
             (use the dynamics command to inspect biased transfer)",
            system.bias
        )));
    }
    let base = config.bath_model();

    // Flatten (curve, abscissa) into point list, curve-major. The sweep
    // value is the abscissa the boundary is plotted against.
    let mut points: Vec<(f64, BathModel)> = Vec::new();
    match section.axis {
        CrossoverAxis::OmegaC => {
            for mu in &section.mu {
                for &omega_c in &section.values {
                    points.push((omega_c, BathModel { omega_c, mu: *mu, ..base }));
                }
            }
        }
        CrossoverAxis::InverseMu => {
            for &omega_c in &section.omega_c {
                for &inv in &section.values {
                    let mu = if inv == 0.0 {
                        Mu::Infinite
                    } else {
                        Mu::from_value(1.0 / inv).map_err(map_core)?
                    };
                    points.push((inv, BathModel { omega_c, mu, ..base }));
                }
            }
        }
    }

    let bracket = match section.bracket {
        Some(b) => Bracket { lo: b.lo, hi: b.hi },
        None => Bracket::default(),
    };

    // Points are independent; indexed collection restores input order.
    let rows: Vec<Row> = points
        .par_iter()
        .map(|(value, bath)| Row {
            value: *value,
            bath: *bath,
            full: solve_tc_full(&system, bath, bracket),
            approx: solve_tc_approx(&system, bath, bracket),
        })
        .collect();

    write_table(
        &out.join(CROSSOVER_FILE),
        &HEADER,
        rows.iter().map(Row::to_record),
    )?;

    let warnings: Vec<String> = rows.iter().flat_map(Row::failures).collect();
    let solves = 2 * rows.len();
    let failed = warnings.len();

    let manifest = RunManifest {
        command: "crossover".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        files: vec![CROSSOVER_FILE.to_string(), MANIFEST_FILE.to_string()],
        runs: Vec::new(),
        warnings: warnings.clone(),
        wall_time_ms: started.elapsed().as_millis() as u64,
    };
    write_manifest(out, &manifest)?;

    if failed == solves && failed > 0 {
        return Err(CliError::Numerical(format!(
            "every crossover solve failed (first: {})",
            warnings[0]
        )));
    }
    if failed > 0 {
        return Err(CliError::PartialSweep(format!(
            "{failed} of {solves} crossover solves failed; see {CROSSOVER_FILE} and the manifest"
        )));
    }
    Ok(())
}
