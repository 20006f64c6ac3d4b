//! Flat `key = value` run configuration with explicit unit suffixes.
//!
//! ```text
//! # geometry
//! a1 = 21.9 um
//! lambda = 18.45 A
//! z = 5 m
//! model = quantum-gaussian
//! coherence = 0.63
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::geometry::{ExperimentGeometry, SlitCenterConvention, ANGSTROM, MICRON};
use crate::optics::{OpticalModelKind, OpticalSetup};
use crate::profile::Grid;
use crate::quantum::{BeamMode, BeamOptions, CoherenceSpec, DecoherenceModel, SlitWeighting};
use crate::{Error, Result};

/// Any of the six simulation models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Optical(OpticalModelKind),
    Quantum(BeamMode),
}

impl Default for ModelChoice {
    fn default() -> Self {
        ModelChoice::Optical(OpticalModelKind::FiniteAveraged)
    }
}

impl ModelChoice {
    pub fn tag(&self) -> &'static str {
        match self {
            ModelChoice::Optical(kind) => kind.tag(),
            ModelChoice::Quantum(mode) => mode.tag(),
        }
    }
}

impl FromStr for ModelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.starts_with("quantum-") {
            return s.parse().map(ModelChoice::Quantum);
        }
        s.parse()
            .map(ModelChoice::Optical)
            .or_else(|_| s.parse().map(ModelChoice::Quantum))
            .map_err(|_| Error::invalid(format!("unknown model '{s}'")))
    }
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Everything a run needs besides the subcommand itself.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: ExperimentGeometry,
    pub model: ModelChoice,
    /// Decoherence of the quantum model; `None` means fully coherent.
    pub deco: Option<DecoherenceModel>,
    pub grid: Grid,
    pub out: Option<PathBuf>,
    pub slit_centers: SlitCenterConvention,
    pub envelope_distance: Option<f64>,
    pub kicks: bool,
    pub weighting: SlitWeighting,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: ExperimentGeometry::default(),
            model: ModelChoice::default(),
            deco: None,
            grid: Grid::default(),
            out: None,
            slit_centers: SlitCenterConvention::default(),
            envelope_distance: None,
            kicks: true,
            weighting: SlitWeighting::default(),
        }
    }
}

impl RunConfig {
    pub fn beam_options(&self, mode: BeamMode) -> BeamOptions {
        BeamOptions {
            mode,
            kicks: self.kicks,
            slit_centers: self.slit_centers,
            weighting: self.weighting,
        }
    }

    pub fn optical_setup(&self) -> Result<OpticalSetup> {
        let setup = OpticalSetup::new(&self.geometry)?;
        match self.envelope_distance {
            Some(b) => setup.with_envelope_distance(b),
            None => Ok(setup),
        }
    }
}

#[derive(Clone, Copy)]
enum Dimension {
    Length,
    Mass,
    Time,
    Angle,
}

fn unit_factor(dim: Dimension, unit: &str) -> Option<f64> {
    match dim {
        Dimension::Length => match unit {
            "m" => Some(1.0),
            "mm" => Some(1e-3),
            "um" | "µm" | "μm" => Some(MICRON),
            "nm" => Some(1e-9),
            "A" | "Å" => Some(ANGSTROM),
            _ => None,
        },
        Dimension::Mass => match unit {
            "kg" => Some(1.0),
            _ => None,
        },
        Dimension::Time => match unit {
            "s" => Some(1.0),
            "ms" => Some(1e-3),
            "us" | "µs" | "μs" => Some(1e-6),
            _ => None,
        },
        Dimension::Angle => match unit {
            "rad" => Some(1.0),
            "deg" => Some(std::f64::consts::PI / 180.0),
            _ => None,
        },
    }
}

// Longest leading number, then the trimmed remainder.
fn split_number(text: &str) -> Option<(f64, &str)> {
    let mut ends: Vec<usize> = text.char_indices().map(|(i, _)| i).skip(1).collect();
    ends.push(text.len());
    ends.into_iter().rev().find_map(|end| {
        let value: f64 = text[..end].trim().parse().ok()?;
        value.is_finite().then(|| (value, text[end..].trim()))
    })
}

fn quantity(line: usize, key: &str, text: &str, dim: Dimension, positive: bool) -> Result<f64> {
    let (value, unit) =
        split_number(text).ok_or_else(|| Error::parse(line, format!("{key}: '{text}' is not a number")))?;
    if unit.is_empty() {
        return Err(Error::parse(line, format!("{key}: missing unit")));
    }
    let factor =
        unit_factor(dim, unit).ok_or_else(|| Error::parse(line, format!("{key}: unsupported unit '{unit}'")))?;
    if positive && !(value > 0.0) {
        return Err(Error::parse(line, format!("{key} must be positive, got {value}")));
    }
    Ok(value * factor)
}

fn parse_bool(line: usize, key: &str, text: &str) -> Result<bool> {
    match text.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::parse(
            line,
            format!("{key}: expected true or false, got '{text}'"),
        )),
    }
}

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}

/// Parses configuration text. Missing keys keep the default setup; `#`
/// starts a comment.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<String> = Vec::new();
    let mut coherence: Option<(usize, CoherenceSpec)> = None;
    let mut env_phase = 0.0;
    let (mut x_min, mut x_max) = (cfg.grid.x_min, cfg.grid.x_max);
    let mut grid_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected 'key = value', got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(Error::parse(line, format!("{key}: missing value")));
        }
        if seen.iter().any(|k| k == key) {
            return Err(Error::parse(line, format!("duplicate key '{key}'")));
        }
        seen.push(key.to_string());

        let g = &mut cfg.geometry;
        match key {
            "a1" => g.a1 = quantity(line, key, value, Dimension::Length, true)?,
            "a2" => g.a2 = quantity(line, key, value, Dimension::Length, true)?,
            "d" => g.d = quantity(line, key, value, Dimension::Length, true)?,
            "w" => g.w = quantity(line, key, value, Dimension::Length, true)?,
            "w0" => g.w0 = quantity(line, key, value, Dimension::Length, true)?,
            "z" => g.z = quantity(line, key, value, Dimension::Length, true)?,
            "v" => g.v = quantity(line, key, value, Dimension::Length, true)?,
            "lambda" => g.lambda_db = quantity(line, key, value, Dimension::Length, true)?,
            "dlambda" => g.delta_lambda = quantity(line, key, value, Dimension::Length, true)?,
            "mass" => g.particle_mass = quantity(line, key, value, Dimension::Mass, true)?,
            "model" => cfg.model = at_line(line, value.parse())?,
            "slit_centers" => cfg.slit_centers = at_line(line, value.parse())?,
            "envelope_distance" => cfg.envelope_distance = Some(quantity(line, key, value, Dimension::Length, true)?),
            "coherence" => {
                let lambda: f64 = value
                    .parse()
                    .map_err(|_| Error::parse(line, format!("coherence: '{value}' is not a number")))?;
                if !(0.0..=1.0).contains(&lambda) {
                    return Err(Error::parse(
                        line,
                        format!("coherence must lie in [0, 1], got {lambda}"),
                    ));
                }
                coherence = Some((line, CoherenceSpec::Direct(lambda)));
            }
            "tau_c" => {
                let tau = quantity(line, key, value, Dimension::Time, true)?;
                coherence = Some((line, CoherenceSpec::CoherenceTime(tau)));
            }
            "env_phase" => env_phase = quantity(line, key, value, Dimension::Angle, false)?,
            "kicks" => cfg.kicks = parse_bool(line, key, value)?,
            "weighting" => cfg.weighting = at_line(line, value.parse())?,
            "x_min" => {
                x_min = quantity(line, key, value, Dimension::Length, false)?;
                grid_line = line;
            }
            "x_max" => {
                x_max = quantity(line, key, value, Dimension::Length, false)?;
                grid_line = line;
            }
            "n" => {
                cfg.grid.n = value
                    .parse()
                    .map_err(|_| Error::parse(line, format!("n: '{value}' is not a positive integer")))?;
                grid_line = line;
            }
            "out" => cfg.out = Some(PathBuf::from(value)),
            other => return Err(Error::parse(line, format!("unknown key '{other}'"))),
        }
    }

    if seen.iter().any(|k| k == "coherence") && seen.iter().any(|k| k == "tau_c") {
        let line = coherence.map(|(l, _)| l).unwrap_or(0);
        return Err(Error::parse(line, "give either coherence or tau_c, not both"));
    }
    cfg.deco = coherence.map(|(_, spec)| DecoherenceModel { spec, env_phase });
    if cfg.deco.is_none() && env_phase != 0.0 {
        cfg.deco = Some(DecoherenceModel::direct(1.0)?.with_env_phase(env_phase));
    }
    cfg.grid = Grid {
        x_min,
        x_max,
        n: cfg.grid.n,
    };
    at_line(grid_line, cfg.grid.validate())?;
    cfg.geometry.validate()?;
    Ok(cfg)
}
