//! Run configuration: a flat `key=value` file (or a previous JSON output)
//! merged with command-line overrides.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

/// Configuration problems. These map to the usage exit code.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Efficiency2d,
    Efficiency3d,
    Gain,
    FeasibleRegion,
    Codebook,
    Volume,
    ScanSweep,
    IntensityMap,
    ParsevalCheck,
}

impl Command {
    const ALL: [(Command, &'static str); 9] = [
        (Command::Efficiency2d, "efficiency2d"),
        (Command::Efficiency3d, "efficiency3d"),
        (Command::Gain, "gain"),
        (Command::FeasibleRegion, "feasible-region"),
        (Command::Codebook, "codebook"),
        (Command::Volume, "volume"),
        (Command::ScanSweep, "scan-sweep"),
        (Command::IntensityMap, "intensity-map"),
        (Command::ParsevalCheck, "parseval-check"),
    ];

    pub fn name(&self) -> &'static str {
        Self::ALL
            .iter()
            .find(|(c, _)| c == self)
            .map(|(_, n)| *n)
            .unwrap_or("")
    }

    fn parse(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .iter()
            .find(|(_, n)| *n == s)
            .map(|(c, _)| *c)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|(_, n)| *n).collect();
                bad(format!(
                    "unknown command '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn name(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }

    fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(bad(format!(
                "unknown format '{other}' (expected csv, json or svg)"
            ))),
        }
    }
}

/// Every key a config may set. Command-line flags use the same names.
pub const KEYS: [&str; 26] = [
    "command",
    "m",
    "n",
    "dx",
    "dy",
    "dz",
    "layers",
    "threshold",
    "gamma",
    "theta1",
    "theta2",
    "phi1",
    "phi2",
    "panels",
    "nodes",
    "out",
    "format",
    "pattern",
    "plane",
    "angles",
    "grid",
    "seed",
    "a_xy",
    "a_xz",
    "a_yz",
    "offset",
];

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub m: usize,
    pub n: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub layers: usize,
    pub threshold: f64,
    pub gamma: Option<f64>,
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub panels: usize,
    pub nodes: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub pattern: String,
    pub plane: String,
    /// Scan angles in degrees.
    pub angles: Vec<f64>,
    pub grid: usize,
    pub seed: u64,
    pub apertures: Option<[f64; 3]>,
    pub offset: [f64; 2],
}

/// Reads a config file. A file whose first non-blank character is `{` is
/// taken as a previous JSON output and its embedded `config` object is used.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        parse_json_config(&text)
    } else {
        parse_key_values(&text)
    }
}

pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected key=value, got '{line}'", i + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_json_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON config: {e}")))?;
    let obj = doc
        .get("config")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("JSON config has no 'config' object"))?;
    let mut map = BTreeMap::new();
    for (k, v) in obj {
        let s = match v {
            Value::Null => continue,
            Value::String(s) => s.clone(),
            Value::Array(items) => items.iter().map(scalar_text).collect::<Vec<_>>().join(","),
            other => scalar_text(other),
        };
        map.insert(k.clone(), s);
    }
    Ok(map)
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn num<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, ConfigError> {
    map.get(key)
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| bad(format!("invalid value for {key}: '{s}'")))
        })
        .transpose()
}

fn list(map: &BTreeMap<String, String>, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
    map.get(key)
        .map(|s| {
            s.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(format!("invalid number in {key}: '{x}'")))
                })
                .collect()
        })
        .transpose()
}

/// Turns merged key/value pairs into a [`RunConfig`], filling defaults.
pub fn resolve(map: &BTreeMap<String, String>) -> Result<RunConfig, ConfigError> {
    if let Some(unknown) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(bad(format!("unknown config key '{unknown}'")));
    }
    let command = Command::parse(map.get("command").ok_or_else(|| bad("no command given"))?)?;
    let dx: f64 = num(map, "dx")?.unwrap_or(0.5);
    let apertures = match (num(map, "a_xy")?, num(map, "a_xz")?, num(map, "a_yz")?) {
        (None, None, None) => None,
        (Some(a), Some(b), Some(c)) => Some([a, b, c]),
        _ => return Err(bad("a_xy, a_xz and a_yz must be given together")),
    };
    let offset = match list(map, "offset")? {
        None => [0.0, 0.0],
        Some(v) if v.len() == 2 => [v[0], v[1]],
        Some(_) => return Err(bad("offset takes two comma-separated values")),
    };
    let pattern = map
        .get("pattern")
        .cloned()
        .unwrap_or_else(|| "isotropic".into());
    if !matches!(pattern.as_str(), "isotropic" | "cosine_theta") {
        return Err(bad(format!("unknown pattern '{pattern}'")));
    }
    let plane = map.get("plane").cloned().unwrap_or_else(|| "xz".into());
    if !matches!(plane.as_str(), "xz" | "yz") {
        return Err(bad(format!("unknown plane '{plane}'")));
    }
    let grid: usize = num(map, "grid")?.unwrap_or(64);
    if grid == 0 {
        return Err(bad("grid must be at least 1"));
    }
    Ok(RunConfig {
        command,
        m: num(map, "m")?.unwrap_or(8),
        n: num(map, "n")?.unwrap_or(8),
        dx,
        dy: num(map, "dy")?.unwrap_or(dx),
        dz: num(map, "dz")?.unwrap_or(0.5),
        layers: num(map, "layers")?.unwrap_or(2),
        threshold: num(map, "threshold")?.unwrap_or(SQRT_2),
        gamma: num(map, "gamma")?,
        theta1: num(map, "theta1")?.unwrap_or(0.0),
        theta2: num(map, "theta2")?.unwrap_or(FRAC_PI_2),
        phi1: num(map, "phi1")?.unwrap_or(FRAC_PI_2),
        phi2: num(map, "phi2")?.unwrap_or(FRAC_PI_2),
        panels: num(map, "panels")?.unwrap_or(256),
        nodes: num(map, "nodes")?.unwrap_or(4),
        out: map.get("out").map(PathBuf::from),
        format: Format::parse(map.get("format").map(String::as_str).unwrap_or("csv"))?,
        pattern,
        plane,
        angles: list(map, "angles")?.unwrap_or_else(|| (0..=18).map(|i| 5.0 * i as f64).collect()),
        grid,
        seed: num(map, "seed")?.unwrap_or(1),
        apertures,
        offset,
    })
}

impl RunConfig {
    /// The resolved settings as JSON, output location excluded, so that
    /// feeding the object back in reproduces the run.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), self.command.name().into());
        m.insert("m".into(), self.m.into());
        m.insert("n".into(), self.n.into());
        m.insert("dx".into(), self.dx.into());
        m.insert("dy".into(), self.dy.into());
        m.insert("dz".into(), self.dz.into());
        m.insert("layers".into(), self.layers.into());
        m.insert("threshold".into(), self.threshold.into());
        m.insert("gamma".into(), self.gamma.map_or(Value::Null, Value::from));
        m.insert("theta1".into(), self.theta1.into());
        m.insert("theta2".into(), self.theta2.into());
        m.insert("phi1".into(), self.phi1.into());
        m.insert("phi2".into(), self.phi2.into());
        m.insert("panels".into(), self.panels.into());
        m.insert("nodes".into(), self.nodes.into());
        m.insert("format".into(), self.format.name().into());
        m.insert("pattern".into(), self.pattern.clone().into());
        m.insert("plane".into(), self.plane.clone().into());
        m.insert("angles".into(), self.angles.clone().into());
        m.insert("grid".into(), self.grid.into());
        m.insert("seed".into(), self.seed.into());
        if let Some([a, b, c]) = self.apertures {
            m.insert("a_xy".into(), a.into());
            m.insert("a_xz".into(), b.into());
            m.insert("a_yz".into(), c.into());
        }
        m.insert("offset".into(), self.offset.to_vec().into());
        Value::Object(m)
    }
}
