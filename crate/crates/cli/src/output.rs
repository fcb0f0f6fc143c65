use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};
use crate::svg::{self, Plot};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits survive a text round trip
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => u8::from(*b).to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => Value::from(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Flag(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Everything a command produces, independent of the output format.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Map<String, Value>,
    pub warnings: Vec<String>,
    pub plot: Plot,
}

pub fn to_csv(data: &Dataset) -> String {
    let mut out = data.columns.join(",");
    out.push('\n');
    for row in &data.rows {
        let line: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(data: &Dataset, cfg: &RunConfig) -> String {
    let mut doc = Map::new();
    doc.insert("command".into(), cfg.command.name().into());
    doc.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    doc.insert("config".into(), cfg.to_json());
    doc.insert(
        "quad".into(),
        serde_json::json!({ "panels_per_axis": cfg.panels, "nodes_per_panel": cfg.nodes }),
    );
    doc.insert("summary".into(), Value::Object(data.summary.clone()));
    doc.insert("warnings".into(), data.warnings.clone().into());
    doc.insert("columns".into(), data.columns.clone().into());
    let rows: Vec<Value> = data
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
        .collect();
    doc.insert("rows".into(), Value::Array(rows));
    let mut text =
        serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values always serialise");
    text.push('\n');
    text
}

pub fn render(data: &Dataset, cfg: &RunConfig) -> String {
    match cfg.format {
        Format::Csv => to_csv(data),
        Format::Json => to_json(data, cfg),
        Format::Svg => svg::render(&data.plot),
    }
}

/// Writes through a temporary file in the target directory, then renames it
/// into place so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
