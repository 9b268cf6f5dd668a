//! Run configuration: a single JSON document shared by all subcommands.
//!
//! Every quantity is a dimensionless ratio in the internal unit system
//! (hbar = k_B = 1, energies in units of the lattice frequency scale):
//! alpha, V, omega_c, bias, mu, and k_B T are all plain numbers. `mu`
//! additionally accepts the string "infinite" for coinciding sites.

use duet_core::bloch::Regime;
use duet_core::{BathModel, Mu, SystemModel};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::CliError;

/// Parsed and validated configuration for one invocation.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    pub bath: BathSection,
    /// Temperature (scalar) or temperature grid; dynamics writes one
    /// trajectory per entry.
    #[serde(default)]
    pub temperature: Temperatures,
    /// Generator regime; `auto` picks resonant on resonance, full otherwise.
    #[serde(default)]
    pub regime: RegimeChoice,
    #[serde(default)]
    pub time: TimeGrid,
    /// Initial lab-frame Bloch vector; defaults to the excitation sitting
    /// fully on the donor, (0, 0, 1).
    #[serde(default)]
    pub initial: Option<[f64; 3]>,
    /// Absolute tolerance handed to the response-kernel transforms.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Frequency grid for the bath tabulation command.
    #[serde(default)]
    pub frequency: FrequencyGrid,
    /// Phase-boundary scan settings (crossover command only).
    #[serde(default)]
    pub crossover: Option<CrossoverSection>,
    /// Parameter-grid settings (sweep command only).
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default)]
    pub bias: f64,
    pub coupling: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub alpha: f64,
    pub omega_c: f64,
    pub mu: Mu,
    /// Spatial dimension of the phonon field; only 3 has closed forms.
    #[serde(default = "default_dimension")]
    pub dimension: u32,
}

fn default_dimension() -> u32 {
    3
}

/// Scalar or list; always iterated in the order given.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Temperatures {
    Scalar(f64),
    Grid(Vec<f64>),
}

impl Default for Temperatures {
    fn default() -> Self {
        Temperatures::Scalar(1.0)
    }
}

impl Temperatures {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Temperatures::Scalar(t) => vec![*t],
            Temperatures::Grid(v) => v.clone(),
        }
    }
}

/// Regime selection including the config-only `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeChoice {
    #[default]
    Auto,
    Resonant,
    Full,
    Weak,
    HighTemperature,
}

impl RegimeChoice {
    /// Concrete regime for a given system.
    pub fn resolve(self, system: &SystemModel) -> Regime {
        match self {
            RegimeChoice::Auto => {
                if system.bias == 0.0 {
                    Regime::Resonant
                } else {
                    Regime::Full
                }
            }
            RegimeChoice::Resonant => Regime::Resonant,
            RegimeChoice::Full => Regime::Full,
            RegimeChoice::Weak => Regime::Weak,
            RegimeChoice::HighTemperature => Regime::HighTemperature,
        }
    }

    pub fn parse_flag(s: &str) -> Result<Self, CliError> {
        let lowered = s.trim().to_ascii_lowercase().replace('_', "-");
        match lowered.as_str() {
            "auto" => Ok(RegimeChoice::Auto),
            "resonant" => Ok(RegimeChoice::Resonant),
            "full" => Ok(RegimeChoice::Full),
            "weak" => Ok(RegimeChoice::Weak),
            "high-temperature" | "high-t" | "hight" => Ok(RegimeChoice::HighTemperature),
            other => Err(CliError::Config(format!(
                "unknown regime '{other}' (expected auto, resonant, full, weak, or high-temperature)"
            ))),
        }
    }
}

impl std::fmt::Display for RegimeChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegimeChoice::Auto => "auto",
            RegimeChoice::Resonant => "resonant",
            RegimeChoice::Full => "full",
            RegimeChoice::Weak => "weak",
            RegimeChoice::HighTemperature => "high-temperature",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            t_max: 60.0,
            points: 600,
        }
    }
}

impl TimeGrid {
    pub fn samples(&self) -> Vec<f64> {
        let n = self.points.max(2);
        (0..n)
            .map(|i| self.t_max * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGrid {
    /// Tabulation covers [-max, max].
    pub max: Option<f64>,
    pub points: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            max: None,
            points: 241,
        }
    }
}

impl FrequencyGrid {
    /// Symmetric grid; the default span covers the spectral density's bulk.
    pub fn samples(&self, omega_c: f64) -> Vec<f64> {
        let max = self.max.unwrap_or(4.0 * omega_c);
        let n = self.points.max(3);
        (0..n)
            .map(|i| -max + 2.0 * max * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Which abscissa the phase boundary is swept against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossoverAxis {
    /// Sweep the cutoff; one curve per `mu` entry.
    OmegaC,
    /// Sweep inverse correlation length; one curve per `omega_c` entry.
    InverseMu,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CrossoverSection {
    pub axis: CrossoverAxis,
    /// Abscissa values (omega_c's, or 1/mu's where 0 means mu = infinite).
    pub values: Vec<f64>,
    /// Curve labels for axis = omega-c: the correlation parameters.
    #[serde(default)]
    pub mu: Vec<Mu>,
    /// Curve labels for axis = inverse-mu: the cutoffs.
    #[serde(default)]
    pub omega_c: Vec<f64>,
    #[serde(default)]
    pub bracket: Option<BracketSection>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSection {
    pub lo: f64,
    pub hi: f64,
}

/// Parameter grid: absent axes inherit the base config scalar. The product
/// of all axis lengths is capped to keep runs bounded.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub temperature: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default)]
    pub omega_c: Option<Vec<f64>>,
    #[serde(default)]
    pub mu: Option<Vec<Mu>>,
    #[serde(default)]
    pub bias: Option<Vec<f64>>,
    #[serde(default)]
    pub coupling: Option<Vec<f64>>,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

fn default_max_points() -> usize {
    10_000
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.bath_model()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.system_model().map(|_| ())?;
        for t in self.temperature.values() {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!(
                    "temperature must be positive and finite, got {t}"
                )));
            }
        }
        if !(self.time.t_max > 0.0 && self.time.t_max.is_finite()) {
            return Err(CliError::Config(format!(
                "time.t_max must be positive, got {}",
                self.time.t_max
            )));
        }
        if self.time.points < 2 {
            return Err(CliError::Config(format!(
                "time.points must be at least 2, got {}",
                self.time.points
            )));
        }
        if let Some(tol) = self.tolerance {
            if !(tol.is_finite() && tol > 0.0 && tol < 1e-2) {
                return Err(CliError::Config(format!(
                    "tolerance must be in (0, 1e-2), got {tol}"
                )));
            }
        }
        if let Some(init) = self.initial {
            if init.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Config("initial state must be finite".into()));
            }
        }
        if let Some(c) = &self.crossover {
            if c.values.is_empty() {
                return Err(CliError::Config("crossover.values must not be empty".into()));
            }
            match c.axis {
                CrossoverAxis::OmegaC => {
                    if c.mu.is_empty() {
                        return Err(CliError::Config(
                            "crossover.mu must list at least one curve for axis omega-c".into(),
                        ));
                    }
                    if c.values.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                        return Err(CliError::Config(
                            "crossover.values must be positive cutoffs".into(),
                        ));
                    }
                }
                CrossoverAxis::InverseMu => {
                    if c.omega_c.is_empty() {
                        return Err(CliError::Config(
                            "crossover.omega_c must list at least one curve for axis inverse-mu"
                                .into(),
                        ));
                    }
                    if c.values.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                        return Err(CliError::Config(
                            "crossover.values must be non-negative inverse correlation lengths"
                                .into(),
                        ));
                    }
                }
            }
            if let Some(b) = c.bracket {
                if !(b.lo.is_finite() && b.hi.is_finite() && b.lo > 0.0 && b.hi > b.lo) {
                    return Err(CliError::Config(format!(
                        "crossover.bracket must satisfy 0 < lo < hi, got [{}, {}]",
                        b.lo, b.hi
                    )));
                }
            }
        }
        if let Some(s) = &self.sweep {
            let n = s.grid_size();
            if n == 0 {
                return Err(CliError::Config(
                    "sweep axes must not contain empty lists".into(),
                ));
            }
            if n > s.max_points {
                return Err(CliError::Config(format!(
                    "sweep grid has {n} points, above the configured cap {}",
                    s.max_points
                )));
            }
        }
        Ok(())
    }

    pub fn system_model(&self) -> Result<SystemModel, CliError> {
        SystemModel::new(self.system.bias, self.system.coupling)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn bath_model(&self) -> BathModel {
        BathModel {
            alpha: self.bath.alpha,
            omega_c: self.bath.omega_c,
            mu: self.bath.mu,
            dimension: self.bath.dimension,
        }
    }
}

impl SweepSection {
    pub fn grid_size(&self) -> usize {
        fn len<T>(v: &Option<Vec<T>>) -> usize {
            v.as_ref().map_or(1, |v| v.len())
        }
        len(&self.temperature)
            * len(&self.alpha)
            * len(&self.omega_c)
            * len(&self.mu)
            * len(&self.bias)
            * len(&self.coupling)
    }
}
