//! Experiment configuration: a TOML document with one level of named sections.
//!
//! ```toml
//! format_version = 1
//! command = "shift-sweep"
//!
//! [constants]          # optional, defaults hbar = mass = 1
//! hbar = 1.0
//! mass = 1.0
//!
//! [grid]
//! x_min = -8.0
//! dx = 0.000125
//! n_points = 128001
//! boundary = "dirichlet"
//!
//! [nonlinearity]
//! eta = [0.1, 0.4, 0.6]
//! length = [0.001, 0.002]
//! fill = "floor"
//!
//! [potential]
//! kind = "harmonic"
//! omega = 1.0
//!
//! [run]
//! states = [0, 1]
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, PhysConstants, COMMENSURATE_RTOL};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Evolve,
    Spectrum,
    ShiftSweep,
    EtaOpt,
    ExactVerify,
    Cotangent,
    Measures,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Spectrum => "spectrum",
            Command::ShiftSweep => "shift-sweep",
            Command::EtaOpt => "eta-opt",
            Command::ExactVerify => "exact-verify",
            Command::Cotangent => "cotangent",
            Command::Measures => "measures",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Command::Evolve,
            Command::Spectrum,
            Command::ShiftSweep,
            Command::EtaOpt,
            Command::ExactVerify,
            Command::Cotangent,
            Command::Measures,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsBlock {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ConstantsBlock {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub x_min: f64,
    pub dx: f64,
    pub n_points: usize,
    pub boundary: Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FillKind {
    Periodic,
    Floor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityBlock {
    pub eta: Vec<f64>,
    pub length: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fill: Option<FillKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Free,
    Harmonic,
    Quartic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialBlock {
    pub kind: PotentialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    Gaussian,
    PlaneWave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftProfile {
    /// Universal η-factor of states with nodes.
    Node,
    /// Oscillator ground-state closed form.
    Gaussian,
}

/// Command-specific settings; each command reads the keys it needs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_states: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavenumber: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ShiftProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_over_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// `[[harmonic, amplitude], ...]`; defaults to the single sine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<(u32, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclusion_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub format_version: u32,
    pub command: Command,
    #[serde(default)]
    pub constants: ConstantsBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<NonlinearityBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialBlock>,
    #[serde(default)]
    pub run: RunBlock,
}

impl ExperimentConfig {
    pub fn consts(&self) -> Result<PhysConstants> {
        PhysConstants::new(self.constants.hbar, self.constants.mass)
    }

    pub fn grid(&self) -> Result<Grid> {
        let g = self.grid.ok_or_else(|| Error::Domain("config has no [grid] section".into()))?;
        Grid::new(g.x_min, g.dx, g.n_points, g.boundary)
    }

    /// Canonical text form; `parse_config(&c.render())` returns `c`.
    pub fn render(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

/// 1-based line of `key` inside `[section]` (or at top level when `section` is empty).
fn line_of(text: &str, section: &str, key: &str) -> usize {
    let mut current = String::new();
    let mut section_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                section_line = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return i + 1;
                }
            }
        }
    }
    section_line.unwrap_or(1)
}

fn invalid(text: &str, section: &str, key: &str, message: impl Into<String>) -> Error {
    Error::ConfigValidation { line: line_of(text, section, key), message: message.into() }
}

/// Parses and validates a config. Errors carry the 1-based line of the offending key.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1).unwrap_or(1);
        Error::ConfigParse { line, message: e.message().to_string() }
    })?;
    validate(&config, text)?;
    Ok(config)
}

fn validate(c: &ExperimentConfig, text: &str) -> Result<()> {
    if c.format_version != FORMAT_VERSION {
        return Err(invalid(text, "", "format_version", format!("unsupported format_version {} (expected {FORMAT_VERSION})", c.format_version)));
    }
    for (key, v) in [("hbar", c.constants.hbar), ("mass", c.constants.mass)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(text, "constants", key, format!("{key} must be positive, got {v}")));
        }
    }
    if let Some(g) = &c.grid {
        if !(g.dx.is_finite() && g.dx > 0.0) {
            return Err(invalid(text, "grid", "dx", format!("dx must be positive, got {}", g.dx)));
        }
        if g.n_points < 8 {
            return Err(invalid(text, "grid", "n_points", format!("n_points must be at least 8, got {}", g.n_points)));
        }
        if !g.x_min.is_finite() {
            return Err(invalid(text, "grid", "x_min", "x_min must be finite"));
        }
    }
    if let Some(nl) = &c.nonlinearity {
        if nl.eta.is_empty() {
            return Err(invalid(text, "nonlinearity", "eta", "eta list is empty"));
        }
        if nl.length.is_empty() {
            return Err(invalid(text, "nonlinearity", "length", "length list is empty"));
        }
        if let Some(e) = nl.eta.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return Err(invalid(text, "nonlinearity", "eta", format!("eta = {e} is outside the range (0, 1]")));
        }
        if let Some(l) = nl.length.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(invalid(text, "nonlinearity", "length", format!("length = {l} must be positive")));
        }
        if let Some(g) = &c.grid {
            for &eta in &nl.eta {
                for &l in &nl.length {
                    let ratio = eta * l / g.dx;
                    if (ratio - ratio.round()).abs() > COMMENSURATE_RTOL * ratio.max(1.0) || ratio.round() < 1.0 {
                        return Err(invalid(
                            text,
                            "nonlinearity",
                            "eta",
                            format!("incommensurate shift: eta = {eta}, L = {l}, dx = {} gives eta*L/dx = {ratio}", g.dx),
                        ));
                    }
                }
            }
        }
    }
    if let Some(p) = &c.potential {
        match p.kind {
            PotentialKind::Harmonic if p.omega.map_or(true, |w| !(w > 0.0)) => {
                return Err(invalid(text, "potential", "omega", "harmonic potential needs omega > 0"));
            }
            PotentialKind::Quartic if p.coefficient.map_or(true, |w| !(w > 0.0)) => {
                return Err(invalid(text, "potential", "coefficient", "quartic potential needs coefficient > 0"));
            }
            _ => {}
        }
    }

    let need = |present: bool, section: &str| -> Result<()> {
        if present {
            Ok(())
        } else {
            Err(invalid(text, "", "command", format!("command {} needs a [{section}] section", c.command.as_str())))
        }
    };
    let need_run = |present: bool, key: &str| -> Result<()> {
        if present {
            Ok(())
        } else {
            Err(invalid(text, "run", key, format!("command {} needs run.{key}", c.command.as_str())))
        }
    };
    let r = &c.run;
    match c.command {
        Command::Evolve => {
            need(c.grid.is_some(), "grid")?;
            need_run(r.dt.is_some(), "dt")?;
            need_run(r.n_steps.is_some(), "n_steps")?;
            need_run(r.initial.is_some(), "initial")?;
        }
        Command::Spectrum => {
            need(c.grid.is_some(), "grid")?;
            need(c.potential.is_some(), "potential")?;
            need_run(r.n_states.is_some(), "n_states")?;
        }
        Command::ShiftSweep => {
            need(c.grid.is_some(), "grid")?;
            need(c.potential.is_some(), "potential")?;
            need(c.nonlinearity.is_some(), "nonlinearity")?;
            need_run(r.states.as_ref().is_some_and(|s| !s.is_empty()), "states")?;
        }
        Command::EtaOpt => need_run(r.profile.is_some(), "profile")?,
        Command::ExactVerify | Command::Cotangent => {
            need(c.grid.is_some(), "grid")?;
            need(c.nonlinearity.is_some(), "nonlinearity")?;
            need_run(r.kappa.is_some(), "kappa")?;
        }
        Command::Measures => {
            need(c.grid.is_some(), "grid")?;
            need(c.nonlinearity.is_some(), "nonlinearity")?;
        }
    }
    Ok(())
}
