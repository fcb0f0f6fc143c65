mod commands;
mod config;
mod output;
mod svg;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use config::ConfigError;

/// Efficiency, gain and feasible-region limits of planar and stacked arrays.
///
/// Settings come from an optional key=value file (or a previous JSON
/// output); flags override the file.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// efficiency2d, efficiency3d, gain, feasible-region, codebook, volume,
    /// scan-sweep, intensity-map or parseval-check
    #[arg(long)]
    command: Option<String>,
    /// key=value file, or a JSON output whose config should be replayed
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Element spacing along x, in wavelengths
    #[arg(long)]
    dx: Option<String>,
    #[arg(long)]
    dy: Option<String>,
    /// Layer separation, in wavelengths
    #[arg(long)]
    dz: Option<String>,
    #[arg(long)]
    layers: Option<String>,
    /// Combining-factor threshold t in [0, 2]
    #[arg(long)]
    threshold: Option<String>,
    /// Inter-layer phase step (rad)
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    theta1: Option<String>,
    #[arg(long)]
    theta2: Option<String>,
    #[arg(long)]
    phi1: Option<String>,
    #[arg(long)]
    phi2: Option<String>,
    /// Quadrature panels per axis
    #[arg(long)]
    panels: Option<String>,
    /// Gauss-Legendre nodes per panel
    #[arg(long)]
    nodes: Option<String>,
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<String>,
    /// csv, json or svg
    #[arg(long)]
    format: Option<String>,
    /// isotropic or cosine_theta
    #[arg(long)]
    pattern: Option<String>,
    /// xz or yz
    #[arg(long)]
    plane: Option<String>,
    /// Comma-separated scan angles in degrees
    #[arg(long)]
    angles: Option<String>,
    /// Samples per axis for maps
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    a_xy: Option<String>,
    #[arg(long)]
    a_xz: Option<String>,
    #[arg(long)]
    a_yz: Option<String>,
    /// Lateral offset of odd layers, "x,y" in wavelengths
    #[arg(long)]
    offset: Option<String>,
}

impl Cli {
    fn overrides(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("command", &self.command),
            ("m", &self.m),
            ("n", &self.n),
            ("dx", &self.dx),
            ("dy", &self.dy),
            ("dz", &self.dz),
            ("layers", &self.layers),
            ("threshold", &self.threshold),
            ("gamma", &self.gamma),
            ("theta1", &self.theta1),
            ("theta2", &self.theta2),
            ("phi1", &self.phi1),
            ("phi2", &self.phi2),
            ("panels", &self.panels),
            ("nodes", &self.nodes),
            ("out", &self.out),
            ("format", &self.format),
            ("pattern", &self.pattern),
            ("plane", &self.plane),
            ("angles", &self.angles),
            ("grid", &self.grid),
            ("seed", &self.seed),
            ("a_xy", &self.a_xy),
            ("a_xz", &self.a_xz),
            ("a_yz", &self.a_yz),
            ("offset", &self.offset),
        ]
    }
}

fn fail(code: u8, kind: &str, message: &str) -> ExitCode {
    let body = json!({ "error": { "kind": kind, "message": message } });
    let _ = writeln!(std::io::stderr(), "{body}");
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("ARRAYLIMITS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        ConfigError(format!(
            "ARRAYLIMITS_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| ConfigError(format!("cannot size the worker pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        return fail(2, "usage", &e.0);
    }
    let mut settings = BTreeMap::new();
    if let Some(path) = &cli.config {
        match config::read_config_file(path) {
            Ok(map) => settings = map,
            Err(e) => return fail(2, "config", &e.0),
        }
    }
    for (key, value) in cli.overrides() {
        if let Some(v) = value {
            settings.insert(key.to_string(), v.clone());
        }
    }
    let cfg = match config::resolve(&settings) {
        Ok(cfg) => cfg,
        Err(e) => return fail(2, "config", &e.0),
    };
    let data = match commands::run(&cfg) {
        Ok(d) => d,
        Err(arraylimits::Error::Domain(m)) => return fail(1, "domain", &m),
        Err(arraylimits::Error::Quadrature(m)) => return fail(1, "quadrature", &m),
    };
    let text = output::render(&data, &cfg);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = output::write_atomic(path, &text) {
                return fail(
                    2,
                    "output",
                    &format!("cannot write {}: {e}", path.display()),
                );
            }
        }
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    ExitCode::SUCCESS
}
