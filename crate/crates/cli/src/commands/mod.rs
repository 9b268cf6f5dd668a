//! Subcommand implementations.

pub mod bath;
pub mod crossover;
pub mod dynamics;
pub mod sweep;

use duet_core::bloch::Regime;
use duet_core::{BathModel, Generator, Propagator, ResponseSet, SystemModel, ThermalState};

use crate::config::RegimeChoice;
use crate::CliError;

/// Map library failures onto exit classes: malformed physical models are
/// configuration mistakes; everything else is a numerical failure.
pub fn map_core(e: duet_core::Error) -> CliError {
    use duet_core::Error as E;
    match e {
        E::InvalidModel(_)
        | E::UnsupportedDimension(_)
        | E::AnalyticNeedsD3(_)
        | E::BiasNotZero(_)
        | E::BiasZero => CliError::Config(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    }
}

/// A generator assembled for one (system, bath, temperature) point,
/// together with the regime actually used and any transform warnings.
pub struct SolvedPoint {
    pub regime: Regime,
    pub generator: Generator,
    pub warnings: Vec<String>,
}

pub fn solve_point(
    system: &SystemModel,
    bath: &BathModel,
    temperature: f64,
    choice: RegimeChoice,
    tolerance: Option<f64>,
) -> Result<SolvedPoint, CliError> {
    let regime = choice.resolve(system);
    let thermal = ThermalState::new(temperature).map_err(map_core)?;
    let propagator = Propagator::new(bath.clone(), thermal).map_err(map_core)?;
    let responses = match tolerance {
        Some(tol) => ResponseSet::with_tolerance(propagator, tol),
        None => ResponseSet::new(propagator),
    };
    let warnings = responses.warnings();
    let generator = Generator::build(regime, system, &responses).map_err(map_core)?;
    Ok(SolvedPoint {
        regime,
        generator,
        warnings,
    })
}

/// Create the output directory if missing; refuse a path that exists but is
/// not a directory.
pub fn ensure_out_dir(dir: &std::path::Path) -> Result<(), CliError> {
    if dir.exists() && !dir.is_dir() {
        return Err(CliError::Io(format!(
            "output path {} exists and is not a directory",
            dir.display()
        )));
    }
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}
