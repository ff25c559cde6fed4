//! Flat `key = value` experiment configuration.
//!
//! Keys carry a section prefix (`grid.`, `scheme.`, ...). Lines starting
//! with `#` are comments. Every key has a default that may depend on the
//! command and scenario; [`ExperimentConfig::echo`] prints the resolved
//! values in the same syntax, so an echo is itself a valid config file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use logse_core::analytic::DynamicsCase;
use logse_core::properties::PropertyConfig;
use logse_core::study::ErrorMeasure;
use logse_core::{GridSpec, Scheme};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    ConvergeTime,
    ConvergeSpace,
    Simulate,
    Truncation,
    Properties,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ConvergeTime => "converge-time",
            Command::ConvergeSpace => "converge-space",
            Command::Simulate => "simulate",
            Command::Truncation => "truncation",
            Command::Properties => "properties",
        }
    }

    fn is_refinement(&self) -> bool {
        matches!(self, Command::ConvergeTime | Command::ConvergeSpace | Command::Truncation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Exact Gausson with frequency `omega`; `λ` comes from `scheme.lambda`.
    Gausson { omega: f64 },
    Case(DynamicsCase),
    /// Zero initial data.
    Zero,
    /// Planted errors `e = p^order`; no simulation.
    Synthetic { order: f64 },
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Gausson { .. } => f.write_str("gausson"),
            Scenario::Case(c) => write!(f, "case-{c}"),
            Scenario::Zero => f.write_str("zero"),
            Scenario::Synthetic { .. } => f.write_str("synthetic"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Time,
    Space,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Time => "time",
            Axis::Space => "space",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    None,
    /// Replace `f(z)` by `conj(z) ln|z|`.
    Conjugate,
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mutation::None => "none",
            Mutation::Conjugate => "conjugate",
        })
    }
}

/// Box `[lower, upper]^dim` with spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSettings {
    pub dim: usize,
    pub lower: f64,
    pub upper: f64,
    pub h: f64,
}

impl GridSettings {
    pub fn spec(&self) -> CliResult<GridSpec> {
        self.spec_with_spacing(self.h)
    }

    pub fn spec_with_spacing(&self, h: f64) -> CliResult<GridSpec> {
        GridSpec::cube_with_spacing(self.dim, self.lower, self.upper, h)
            .map_err(|e| CliError::key("grid.h", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSettings {
    pub scheme: Scheme,
    pub lambda: f64,
    pub tau: f64,
    pub t_final: f64,
}

/// Levels `base · 2^{−j}`, `j = first..first + levels`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub base: f64,
    pub first: u32,
    pub levels: usize,
    pub measure: ErrorMeasure,
    pub axis: Axis,
}

impl Refinement {
    pub fn values(&self) -> Vec<f64> {
        logse_core::study::halving_sequence(self.base, self.first, self.levels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputSettings {
    pub series_stride: usize,
    pub snapshot_stride: usize,
}

/// Windows on observed orders; the bounds are inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Acceptance {
    pub l2_min: f64,
    pub l2_max: f64,
    pub h1_min: f64,
    pub h1_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertiesSettings {
    pub seed: u64,
    pub samples: usize,
    pub oracle_cases: usize,
    pub mutation: Mutation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub grid: GridSettings,
    pub scheme: SchemeSettings,
    pub scenario: Scenario,
    pub refinement: Refinement,
    pub output_dir: PathBuf,
    pub output: OutputSettings,
    pub acceptance: Acceptance,
    pub residual_check: bool,
    pub properties: PropertiesSettings,
}

pub const KNOWN_KEYS: &[&str] = &[
    "grid.dim",
    "grid.lower",
    "grid.upper",
    "grid.h",
    "scheme.name",
    "scheme.lambda",
    "scheme.tau",
    "scheme.t_final",
    "scenario.kind",
    "scenario.omega",
    "scenario.order",
    "refinement.base",
    "refinement.first",
    "refinement.levels",
    "refinement.measure",
    "refinement.axis",
    "output.dir",
    "output.series_stride",
    "output.snapshot_stride",
    "acceptance.l2_min",
    "acceptance.l2_max",
    "acceptance.h1_min",
    "acceptance.h1_max",
    "solver.residual_check",
    "properties.seed",
    "properties.samples",
    "properties.oracle_cases",
    "properties.mutation",
];

/// Raw `key -> value` entries, later entries overriding earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            raw.set(k.trim(), v.trim())?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::key(key, "unknown key"));
        }
        if value.is_empty() {
            return Err(CliError::key(key, "missing value"));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies `--key value` / `--key=value` pairs.
    pub fn apply_flags(&mut self, flags: &[String]) -> CliResult<()> {
        let mut it = flags.iter();
        while let Some(flag) = it.next() {
            let body = flag
                .strip_prefix("--")
                .ok_or_else(|| CliError::Config(format!("expected `--key value`, got `{flag}`")))?;
            let (key, value) = match body.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let v = it.next().ok_or_else(|| CliError::key(body, "missing value"))?;
                    (body.to_string(), v.clone())
                }
            };
            self.set(&key, &value)?;
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parsed<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Option<T>) -> CliResult<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse(v).ok_or_else(|| CliError::key(key, format!("invalid value `{v}`"))),
        }
    }

    fn f64(&self, key: &str, default: f64) -> CliResult<f64> {
        self.parsed(key, default, parse_number)
    }

    fn usize(&self, key: &str, default: usize) -> CliResult<usize> {
        self.parsed(key, default, |s| s.parse().ok())
    }
}

/// Parses `1.5`, `-8`, `1/32`, `1e-3`, `inf`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (b != 0.0).then_some(a / b);
    }
    s.parse().ok()
}

fn parse_scenario_kind(s: &str) -> Option<ScenarioKind> {
    match s.trim().to_ascii_lowercase().as_str() {
        "gausson" => Some(ScenarioKind::Gausson),
        "zero" => Some(ScenarioKind::Zero),
        "synthetic" => Some(ScenarioKind::Synthetic),
        other => other.parse::<DynamicsCase>().ok().map(ScenarioKind::Case),
    }
}

#[derive(Clone, Copy)]
enum ScenarioKind {
    Gausson,
    Case(DynamicsCase),
    Zero,
    Synthetic,
}

impl ExperimentConfig {
    pub fn resolve(command: Command, raw: &RawConfig) -> CliResult<Self> {
        use Command::*;
        let kind = raw.parsed("scenario.kind", ScenarioKind::Gausson, parse_scenario_kind)?;
        let axis = raw.parsed("refinement.axis", Axis::Time, |s| match s {
            "time" => Some(Axis::Time),
            "space" => Some(Axis::Space),
            _ => None,
        })?;
        let temporal = command == ConvergeTime || (command == Truncation && axis == Axis::Time);
        let spatial = command == ConvergeSpace || (command == Truncation && axis == Axis::Space);

        let preset = match kind {
            ScenarioKind::Case(c) => Some(c.preset()),
            _ => None,
        };
        let (d_lower, d_upper, d_h) = match (&preset, command) {
            (Some(p), _) => (p.spec.lower(0), p.spec.upper(0), p.spec.spacing(0)),
            (None, Truncation) => (-8.0, 8.0, 1.0 / 64.0),
            (None, _) => (-5.0, 5.0, 1.0 / 32.0),
        };
        let grid = GridSettings {
            dim: raw.usize("grid.dim", 2)?,
            lower: raw.f64("grid.lower", d_lower)?,
            upper: raw.f64("grid.upper", d_upper)?,
            h: raw.f64("grid.h", d_h)?,
        };
        if !(1..=3).contains(&grid.dim) {
            return Err(CliError::key("grid.dim", "must be 1, 2 or 3"));
        }
        if !(grid.lower < grid.upper) {
            return Err(CliError::key("grid.upper", "must exceed grid.lower"));
        }
        if !(grid.h > 0.0) {
            return Err(CliError::key("grid.h", "must be positive"));
        }

        let (d_scheme, d_lambda, d_tau, d_t) = match (&preset, command) {
            (Some(p), _) => (p.scheme, p.lambda, p.tau, p.t_final),
            (None, ConvergeSpace) => (Scheme::Bdf2, -1.0, 1e-3, 0.25),
            (None, Truncation) => (Scheme::Bdf1, -1.0, 1e-4, 0.25),
            (None, _) => (Scheme::Bdf1, -1.0, 0.01, 0.5),
        };
        let scheme = SchemeSettings {
            scheme: raw.parsed("scheme.name", d_scheme, |s| s.parse().ok())?,
            lambda: raw.f64("scheme.lambda", d_lambda)?,
            tau: raw.f64("scheme.tau", d_tau)?,
            t_final: raw.f64("scheme.t_final", d_t)?,
        };
        if !(scheme.tau > 0.0) {
            return Err(CliError::key("scheme.tau", "must be positive"));
        }
        if !(scheme.t_final >= 0.0) {
            return Err(CliError::key("scheme.t_final", "must be non-negative"));
        }

        let scenario = match kind {
            ScenarioKind::Gausson => {
                let omega = raw.f64("scenario.omega", if temporal { 1.0 } else { 0.0 })?;
                if !(scheme.lambda < 0.0) {
                    return Err(CliError::key("scheme.lambda", "the Gausson needs lambda < 0"));
                }
                Scenario::Gausson { omega }
            }
            ScenarioKind::Case(c) => {
                if grid.dim != 2 {
                    return Err(CliError::key("grid.dim", "dynamics cases are 2D"));
                }
                Scenario::Case(c)
            }
            ScenarioKind::Zero => Scenario::Zero,
            ScenarioKind::Synthetic => Scenario::Synthetic {
                order: raw.f64("scenario.order", 1.0)?,
            },
        };
        if command.is_refinement() && matches!(scenario, Scenario::Case(_)) {
            return Err(CliError::key("scenario.kind", "refinement studies need an exact solution"));
        }
        if command == Truncation && !matches!(scenario, Scenario::Gausson { .. }) {
            return Err(CliError::key("scenario.kind", "truncation needs the gausson scenario"));
        }

        let (d_base, d_first) = if spatial { (0.125, 0) } else { (0.1, 1) };
        let refinement = Refinement {
            base: raw.f64("refinement.base", d_base)?,
            first: raw.parsed("refinement.first", d_first, |s| s.parse().ok())?,
            levels: raw.usize("refinement.levels", 4)?,
            measure: raw.parsed("refinement.measure", ErrorMeasure::FinalTime, |s| s.parse().ok())?,
            axis,
        };
        if command.is_refinement() && refinement.levels < 3 {
            return Err(CliError::key("refinement.levels", "at least 3 levels are required"));
        }
        if !(refinement.base > 0.0) {
            return Err(CliError::key("refinement.base", "must be positive"));
        }

        let (l2w, h1w) = match (command, scheme.scheme, spatial) {
            (Truncation, _, true) => ((1.9, 2.1), (f64::NEG_INFINITY, f64::INFINITY)),
            (Truncation, Scheme::Bdf1, false) => ((0.9, 1.1), (f64::NEG_INFINITY, f64::INFINITY)),
            (Truncation, Scheme::Bdf2, false) => ((1.7, 2.2), (f64::NEG_INFINITY, f64::INFINITY)),
            (_, _, true) => ((1.8, 2.2), (1.8, 2.2)),
            (_, Scheme::Bdf1, false) => ((0.85, 1.15), (0.45, f64::INFINITY)),
            (_, Scheme::Bdf2, false) => ((1.8, 2.2), (1.4, f64::INFINITY)),
        };
        let acceptance = Acceptance {
            l2_min: raw.f64("acceptance.l2_min", l2w.0)?,
            l2_max: raw.f64("acceptance.l2_max", l2w.1)?,
            h1_min: raw.f64("acceptance.h1_min", h1w.0)?,
            h1_max: raw.f64("acceptance.h1_max", h1w.1)?,
        };

        let defaults = PropertyConfig::default();
        let properties = PropertiesSettings {
            seed: raw.parsed("properties.seed", defaults.seed, |s| s.parse().ok())?,
            samples: raw.usize("properties.samples", defaults.samples)?,
            oracle_cases: raw.usize("properties.oracle_cases", 100)?,
            mutation: raw.parsed("properties.mutation", Mutation::None, |s| match s {
                "none" => Some(Mutation::None),
                "conjugate" => Some(Mutation::Conjugate),
                _ => None,
            })?,
        };

        Ok(ExperimentConfig {
            command,
            grid,
            scheme,
            scenario,
            refinement,
            output_dir: PathBuf::from(raw.get("output.dir").unwrap_or("out")),
            output: OutputSettings {
                series_stride: raw.usize("output.series_stride", 10)?,
                snapshot_stride: raw.usize("output.snapshot_stride", 0)?,
            },
            acceptance,
            residual_check: raw.parsed("solver.residual_check", false, |s| bool::from_str(s).ok())?,
            properties,
        })
    }

    /// Reads `--config PATH` (if any) and applies the remaining flags.
    pub fn from_args(command: Command, config: Option<&Path>, flags: &[String]) -> CliResult<Self> {
        let mut raw = match config {
            Some(p) => RawConfig::from_file(p)?,
            None => RawConfig::default(),
        };
        raw.apply_flags(flags)?;
        Self::resolve(command, &raw)
    }

    /// Every resolved key as `key = value`, sorted by key.
    pub fn echo(&self) -> String {
        let mut m: BTreeMap<&str, String> = BTreeMap::new();
        m.insert("grid.dim", self.grid.dim.to_string());
        m.insert("grid.lower", self.grid.lower.to_string());
        m.insert("grid.upper", self.grid.upper.to_string());
        m.insert("grid.h", self.grid.h.to_string());
        m.insert("scheme.name", self.scheme.scheme.to_string());
        m.insert("scheme.lambda", self.scheme.lambda.to_string());
        m.insert("scheme.tau", self.scheme.tau.to_string());
        m.insert("scheme.t_final", self.scheme.t_final.to_string());
        m.insert("scenario.kind", self.scenario.to_string());
        match self.scenario {
            Scenario::Gausson { omega } => {
                m.insert("scenario.omega", omega.to_string());
            }
            Scenario::Synthetic { order } => {
                m.insert("scenario.order", order.to_string());
            }
            _ => {}
        }
        m.insert("refinement.base", self.refinement.base.to_string());
        m.insert("refinement.first", self.refinement.first.to_string());
        m.insert("refinement.levels", self.refinement.levels.to_string());
        m.insert("refinement.measure", self.refinement.measure.to_string());
        m.insert("refinement.axis", self.refinement.axis.to_string());
        m.insert("output.dir", self.output_dir.display().to_string());
        m.insert("output.series_stride", self.output.series_stride.to_string());
        m.insert("output.snapshot_stride", self.output.snapshot_stride.to_string());
        m.insert("acceptance.l2_min", self.acceptance.l2_min.to_string());
        m.insert("acceptance.l2_max", self.acceptance.l2_max.to_string());
        m.insert("acceptance.h1_min", self.acceptance.h1_min.to_string());
        m.insert("acceptance.h1_max", self.acceptance.h1_max.to_string());
        m.insert("solver.residual_check", self.residual_check.to_string());
        m.insert("properties.seed", self.properties.seed.to_string());
        m.insert("properties.samples", self.properties.samples.to_string());
        m.insert("properties.oracle_cases", self.properties.oracle_cases.to_string());
        m.insert("properties.mutation", self.properties.mutation.to_string());
        let mut out = format!("# {}\n", self.command.name());
        for (k, v) in m {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("1/32"), Some(0.03125));
        assert_eq!(parse_number(" -8 "), Some(-8.0));
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("inf"), Some(f64::INFINITY));
        assert_eq!(parse_number("1/0"), None);
        assert_eq!(parse_number("x"), None);
    }

    #[test]
    fn parse_rejects_malformed_lines() {
        assert!(RawConfig::parse("grid.h 0.1").is_err());
        assert!(matches!(
            RawConfig::parse("grid.cells = 4"),
            Err(CliError::Key { key, .. }) if key == "grid.cells"
        ));
        let raw = RawConfig::parse("# comment\n\n grid.h = 1/16 \n").unwrap();
        assert_eq!(raw.get("grid.h"), Some("1/16"));
    }

    #[test]
    fn flags_override_file_values() {
        let mut raw = RawConfig::parse("scheme.tau = 0.1").unwrap();
        raw.apply_flags(&["--scheme.tau".into(), "0.05".into(), "--grid.h=1/8".into()])
            .unwrap();
        assert_eq!(raw.get("scheme.tau"), Some("0.05"));
        assert_eq!(raw.get("grid.h"), Some("1/8"));
        assert!(raw.apply_flags(&["--scheme.tau".into()]).is_err());
        assert!(raw.apply_flags(&["scheme.tau".into(), "1".into()]).is_err());
    }
}
