//! Run configuration: a JSON document, optionally overridden by `key=value`
//! pairs addressed with dotted paths.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::kernel::{KineticSpec, PotentialSpec, Shape};
use crate::oscillator::QuantumNumbers;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Solve,
    Spectrum,
    Harmonic,
    Regge,
    Critical,
    OracleCompare,
    Scaling,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Solve => "solve",
            CommandKind::Spectrum => "spectrum",
            CommandKind::Harmonic => "harmonic",
            CommandKind::Regge => "regge",
            CommandKind::Critical => "critical",
            CommandKind::OracleCompare => "oracle-compare",
            CommandKind::Scaling => "scaling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// `T(p) = a p^b`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticsConfig {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    /// `W(r) = c r^f`
    PowerLaw { c: f64, f: f64 },
    /// `W(r) = -g w(r/a)`
    FiniteRange { g: f64, shape: Shape, a: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LevelSelection {
    #[default]
    Ground,
    Lowest(usize),
    Explicit { n: Vec<u32>, l: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

/// Reference method for `oracle-compare`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleChoice {
    Numerov,
    Basis,
}

fn default_dimension() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<CommandKind>,
    #[serde(default)]
    pub kinetics: Option<KineticsConfig>,
    #[serde(default)]
    pub potential: Option<PotentialConfig>,
    /// Number of particles.
    #[serde(default)]
    pub n: Option<usize>,
    /// Space dimension.
    #[serde(default = "default_dimension")]
    pub d: usize,
    /// Upper end of particle-number sweeps.
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub levels: LevelSelection,
    #[serde(default)]
    pub mass: Option<f64>,
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Weight harmonic multiplicities by `2l + 1`.
    #[serde(default)]
    pub angular: bool,
    /// Defaults to Numerov for quadratic kinetics and the basis otherwise.
    #[serde(default)]
    pub oracle: Option<OracleChoice>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Reads the configuration file (or starts from `{}`), applies the
/// overrides in order and deserializes the result.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut doc = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::domain(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str::<Value>(&text).map_err(|e| {
                Error::domain(format!(
                    "{}: line {}, column {}: {e}",
                    p.display(),
                    e.line(),
                    e.column()
                ))
            })?
        }
        None => Value::Object(Map::new()),
    };
    for item in overrides {
        apply_override(&mut doc, item)?;
    }
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        Error::domain(format!("field `{path}`: {}", e.into_inner()))
    })
}

/// `a.b.c=value`; the value is read as JSON when it parses, as a string
/// otherwise.
pub fn apply_override(doc: &mut Value, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::domain(format!("--set expects key=value, got `{item}`")))?;
    let keys: Vec<&str> = key.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::domain(format!("--set: malformed key `{key}`")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    for k in &keys[..keys.len() - 1] {
        if !node.is_object() {
            *node = Value::Object(Map::new());
        }
        node = node
            .as_object_mut()
            .expect("just made an object")
            .entry(k.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    if !node.is_object() {
        *node = Value::Object(Map::new());
    }
    node.as_object_mut()
        .expect("just made an object")
        .insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

fn missing(field: &str, command: CommandKind) -> Error {
    Error::domain(format!("field `{field}` is required by `{}`", command.name()))
}

fn in_field(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Domain(msg) => Error::domain(format!("field `{field}`: {msg}")),
        other => other,
    }
}

impl RunConfig {
    pub fn kinetic_spec(&self, command: CommandKind) -> Result<KineticSpec> {
        let k = self.kinetics.ok_or_else(|| missing("kinetics", command))?;
        KineticSpec::power_law(k.a, k.b).map_err(in_field("kinetics"))
    }

    pub fn potential_spec(&self, command: CommandKind) -> Result<PotentialSpec> {
        match self.potential.ok_or_else(|| missing("potential", command))? {
            PotentialConfig::PowerLaw { c, f } => PotentialSpec::power_law(c, f),
            PotentialConfig::FiniteRange { g, shape, a } => PotentialSpec::finite_range(g, shape, a),
        }
        .map_err(in_field("potential"))
    }

    pub fn particles(&self, command: CommandKind) -> Result<usize> {
        let n = self.n.ok_or_else(|| missing("n", command))?;
        if n < 2 {
            return Err(Error::domain(format!("field `n`: need at least 2 particles, got {n}")));
        }
        Ok(n)
    }

    pub fn sweep_end(&self, command: CommandKind, minimum: usize) -> Result<usize> {
        let n_max = self.n_max.ok_or_else(|| missing("n_max", command))?;
        if n_max < minimum {
            return Err(Error::domain(format!("field `n_max`: must be >= {minimum}, got {n_max}")));
        }
        Ok(n_max)
    }

    pub fn dimension(&self) -> Result<usize> {
        if self.d < 1 {
            return Err(Error::domain("field `d`: space dimension must be >= 1"));
        }
        Ok(self.d)
    }

    /// Quantum numbers for a single-level selection.
    pub fn single_level(&self, command: CommandKind, n: usize) -> Result<QuantumNumbers> {
        let d = self.dimension()?;
        match &self.levels {
            LevelSelection::Ground => QuantumNumbers::ground(n, d),
            LevelSelection::Explicit { n: radial, l } => {
                QuantumNumbers::new(n, d, radial.clone(), l.clone()).map_err(in_field("levels.explicit"))
            }
            LevelSelection::Lowest(_) => Err(Error::domain(format!(
                "field `levels`: `{}` takes a single level (ground or explicit)",
                command.name()
            ))),
        }
    }

    /// Level count for `lowest`-style commands; `ground` counts as one.
    pub fn level_count(&self, command: CommandKind) -> Result<usize> {
        match self.levels {
            LevelSelection::Ground => Ok(1),
            LevelSelection::Lowest(0) => Err(Error::domain("field `levels.lowest`: must be >= 1")),
            LevelSelection::Lowest(k) => Ok(k),
            LevelSelection::Explicit { .. } => Err(Error::domain(format!(
                "field `levels`: `{}` takes `ground` or `lowest`",
                command.name()
            ))),
        }
    }

    pub fn positive(&self, field: &str, value: Option<f64>, default: f64) -> Result<f64> {
        let v = value.unwrap_or(default);
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!("field `{field}`: must be > 0, got {v}")));
        }
        Ok(v)
    }
}
