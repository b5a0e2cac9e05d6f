use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::SimulationConfig;
use crate::lab::fixtures::Fault;
use crate::lab::LabTolerance;
use crate::multipliers::Alpha;
use crate::spectral::SpectralGrid;
use crate::{Error, Result};

/// Which reports a run produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckToggles {
    pub l2: bool,
    pub h1: bool,
    pub h2: bool,
    pub decay: bool,
    pub blowup: bool,
}

impl Default for CheckToggles {
    fn default() -> Self {
        Self {
            l2: true,
            h1: true,
            h2: true,
            decay: true,
            blowup: true,
        }
    }
}

/// Axes of a sweep; an empty axis keeps the base value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepAxes {
    pub alpha: Vec<f64>,
    pub delta: Vec<f64>,
    pub n: Vec<usize>,
}

impl SweepAxes {
    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty() && self.delta.is_empty() && self.n.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub simulation: SimulationConfig,
    pub checks: CheckToggles,
    /// Threshold of the blow-up rate monitor.
    pub epsilon: f64,
    pub tolerance: LabTolerance,
    pub output: PathBuf,
    /// Re-read every written ledger and require a bit-exact match.
    pub strict: bool,
    pub sweep: SweepAxes,
    /// Corrupt the ledger before checking; for exercising the detectors.
    pub inject_fault: Option<Fault>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            simulation: SimulationConfig::default(),
            checks: CheckToggles::default(),
            epsilon: 0.1,
            tolerance: LabTolerance::default(),
            output: PathBuf::from("selfsim-out"),
            strict: false,
            sweep: SweepAxes::default(),
            inject_fault: None,
        }
    }
}

/// Recognised keys, in the order [`RunConfig::to_text`] writes them.
pub const CONFIG_KEYS: [&str; 30] = [
    "n",
    "box_length",
    "horizon",
    "kind",
    "amplitude",
    "seed",
    "delta",
    "k_max",
    "c_cfl",
    "alpha",
    "t_min",
    "stride",
    "dtau_max",
    "nonlinear",
    "epsilon",
    "burn_in",
    "decay_tol",
    "decay_ratio",
    "route_slack",
    "check_l2",
    "check_h1",
    "check_h2",
    "check_decay",
    "check_blowup",
    "output",
    "strict",
    "sweep_alpha",
    "sweep_delta",
    "sweep_n",
    "inject_fault",
];

fn parse<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse {value:?} as {}", std::any::type_name::<T>()))
}

fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got {value:?}")),
    }
}

fn parse_optional<T: FromStr>(value: &str) -> std::result::Result<Option<T>, String> {
    if value == "none" {
        Ok(None)
    } else {
        parse(value).map(Some)
    }
}

fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn optional<T: fmt::Display>(value: &Option<T>) -> String {
    value
        .as_ref()
        .map_or_else(|| "none".to_string(), |v| v.to_string())
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let sim = &mut self.simulation;
        match key {
            "n" => sim.n = parse(value)?,
            "box_length" => sim.box_length = parse(value)?,
            "horizon" => sim.horizon = parse(value)?,
            "kind" => sim.initial.kind = value.parse().map_err(|e: Error| e.to_string())?,
            "amplitude" => sim.initial.amplitude = parse(value)?,
            "seed" => sim.initial.seed = parse(value)?,
            "delta" => sim.initial.delta = parse_optional(value)?,
            "k_max" => sim.initial.k_max = parse(value)?,
            "c_cfl" => sim.c_cfl = parse(value)?,
            "alpha" => {
                let alpha: f64 = parse(value)?;
                Alpha::new(alpha).map_err(|e| e.to_string())?;
                sim.alpha = alpha;
            }
            "t_min" => sim.t_min = parse_optional(value)?,
            "stride" => sim.stride = parse(value)?,
            "dtau_max" => sim.dtau_max = parse(value)?,
            "nonlinear" => sim.nonlinear = parse_bool(value)?,
            "epsilon" => self.epsilon = parse(value)?,
            "burn_in" => self.tolerance.burn_in = parse(value)?,
            "decay_tol" => self.tolerance.decay_tol = parse(value)?,
            "decay_ratio" => self.tolerance.decay_ratio = parse(value)?,
            "route_slack" => self.tolerance.route_slack = parse(value)?,
            "check_l2" => self.checks.l2 = parse_bool(value)?,
            "check_h1" => self.checks.h1 = parse_bool(value)?,
            "check_h2" => self.checks.h2 = parse_bool(value)?,
            "check_decay" => self.checks.decay = parse_bool(value)?,
            "check_blowup" => self.checks.blowup = parse_bool(value)?,
            "output" => self.output = PathBuf::from(value),
            "strict" => self.strict = parse_bool(value)?,
            "sweep_alpha" => self.sweep.alpha = parse_list(value)?,
            "sweep_delta" => self.sweep.delta = parse_list(value)?,
            "sweep_n" => self.sweep.n = parse_list(value)?,
            "inject_fault" => {
                self.inject_fault = match value {
                    "none" => None,
                    v => Some(v.parse().map_err(|e: Error| e.to_string())?),
                }
            }
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Ranges that do not depend on a single key.
    pub fn validate(&self) -> Result<()> {
        self.simulation.validate()?;
        let nonnegative = [
            ("epsilon", self.epsilon),
            ("burn_in", self.tolerance.burn_in),
            ("decay_tol", self.tolerance.decay_tol),
            ("decay_ratio", self.tolerance.decay_ratio),
            ("route_slack", self.tolerance.route_slack),
        ];
        for (name, value) in nonnegative {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and nonnegative, got {value}"
                )));
            }
        }
        for &alpha in &self.sweep.alpha {
            Alpha::new(alpha)?;
        }
        for &delta in &self.sweep.delta {
            if !(delta >= 0.0 && delta.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "sweep delta {delta} is negative"
                )));
            }
        }
        for &n in &self.sweep.n {
            SpectralGrid::new(n, self.simulation.box_length)?;
        }
        let output = self.output.to_string_lossy();
        if output.is_empty() || output.contains(['#', '\n']) || output.trim() != output {
            return Err(Error::InvalidParameter(format!(
                "output path {output:?} cannot be written in the config format"
            )));
        }
        Ok(())
    }

    /// Canonical text form; [`parse_config`] reads it back unchanged.
    pub fn to_text(&self) -> String {
        let sim = &self.simulation;
        let values: [String; 30] = [
            sim.n.to_string(),
            sim.box_length.to_string(),
            sim.horizon.to_string(),
            sim.initial.kind.to_string(),
            sim.initial.amplitude.to_string(),
            sim.initial.seed.to_string(),
            optional(&sim.initial.delta),
            sim.initial.k_max.to_string(),
            sim.c_cfl.to_string(),
            sim.alpha.to_string(),
            optional(&sim.t_min),
            sim.stride.to_string(),
            sim.dtau_max.to_string(),
            sim.nonlinear.to_string(),
            self.epsilon.to_string(),
            self.tolerance.burn_in.to_string(),
            self.tolerance.decay_tol.to_string(),
            self.tolerance.decay_ratio.to_string(),
            self.tolerance.route_slack.to_string(),
            self.checks.l2.to_string(),
            self.checks.h1.to_string(),
            self.checks.h2.to_string(),
            self.checks.decay.to_string(),
            self.checks.blowup.to_string(),
            self.output.display().to_string(),
            self.strict.to_string(),
            join(&self.sweep.alpha),
            join(&self.sweep.delta),
            join(&self.sweep.n),
            optional(&self.inject_fault),
        ];
        let mut out = String::new();
        for (key, value) in CONFIG_KEYS.iter().zip(values) {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses the line-oriented `key = value` format: `#` starts a comment,
/// blank lines are skipped, keys may appear once, missing keys keep their
/// defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fail = |message: String| Error::Config { line, message };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| fail(format!("expected `key = value`, got {content:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if let Some(first) = seen.insert(key, line) {
            return Err(fail(format!("key {key:?} already set on line {first}")));
        }
        config.set(key, value).map_err(fail)?;
    }
    config.validate()?;
    Ok(config)
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_config(s)
    }
}
