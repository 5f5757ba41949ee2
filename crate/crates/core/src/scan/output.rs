//! Tabular output: CSV or JSON data files and the side-car manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::units::{AMU, DEBYE, EPSILON0, HBAR, PLANCK};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::Num(x.unwrap_or(f64::NAN))
    }
}

/// Seventeen significant digits, exact on round trip.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    /// Formula the column realizes, or `plumbing`.
    pub reference: String,
}

pub fn col(name: &str, unit: &str, reference: &str) -> Column {
    Column {
        name: name.into(),
        unit: unit.into(),
        reference: reference.into(),
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    /// File stem, e.g. `stark`.
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<Column>) -> Self {
        Table {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width in {}", self.name);
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(t: &Table, command: &str, hash: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# polarmol {} {command}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# manifest_sha256 {hash}");
    let units: Vec<String> = t
        .columns
        .iter()
        .map(|c| format!("{}[{}]", c.name, c.unit))
        .collect();
    let _ = writeln!(out, "# units {}", units.join(","));
    let names: Vec<String> = t.columns.iter().map(|c| csv_field(&c.name)).collect();
    let _ = writeln!(out, "{}", names.join(","));
    for row in &t.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(x) => fmt_float(*x),
                Cell::Int(i) => i.to_string(),
                Cell::Text(s) => csv_field(s),
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

pub fn render_json(t: &Table, command: &str, hash: &str) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(
        out,
        "  \"tool\": {},",
        json_str(&format!("polarmol {}", env!("CARGO_PKG_VERSION")))
    );
    let _ = writeln!(out, "  \"command\": {},", json_str(command));
    let _ = writeln!(out, "  \"manifest_sha256\": {},", json_str(hash));
    out.push_str("  \"columns\": [\n");
    for (i, c) in t.columns.iter().enumerate() {
        let sep = if i + 1 < t.columns.len() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"name\": {}, \"unit\": {}}}{sep}",
            json_str(&c.name),
            json_str(&c.unit)
        );
    }
    out.push_str("  ],\n  \"rows\": [\n");
    for (i, row) in t.rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(x) if x.is_finite() => fmt_float(*x),
                Cell::Num(_) => "null".into(),
                Cell::Int(i) => i.to_string(),
                Cell::Text(s) => json_str(s),
            })
            .collect();
        let sep = if i + 1 < t.rows.len() { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", cells.join(", "));
    }
    out.push_str("  ]\n}\n");
    out
}

/// `sha256(version ‖ command ‖ canonical config)`, hex encoded.
pub fn config_hash(command: &str, config_toml: &str) -> String {
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.update([0u8]);
    h.update(command.as_bytes());
    h.update([0u8]);
    h.update(config_toml.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub rows: usize,
    pub columns: Vec<Column>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Constants {
    pub debye_c_m: f64,
    pub amu_kg: f64,
    pub planck_j_s: f64,
    pub hbar_j_s: f64,
    pub epsilon0_f_m: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            debye_c_m: DEBYE,
            amu_kg: AMU,
            planck_j_s: PLANCK,
            hbar_j_s: HBAR,
            epsilon0_f_m: EPSILON0,
        }
    }
}

/// A grid point that failed; the row is still written with `status` set.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub file: String,
    pub point: String,
    pub error: String,
}

/// Execution details that vary between runs of the same config.
#[derive(Debug, Clone, Serialize)]
pub struct RunInfo {
    pub wall_time_s: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub manifest_sha256: String,
    pub config: serde_json::Value,
    pub config_toml: String,
    pub constants: Constants,
    pub files: Vec<FileEntry>,
    pub notes: Vec<String>,
    pub failures: Vec<Failure>,
    pub run: RunInfo,
}

/// Everything a command produces before it is written out.
#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
    pub failures: Vec<Failure>,
}

/// Write the data files and `<command>.manifest.json` into `dir`.
pub fn write_all(
    dir: &Path,
    command: &str,
    config: &crate::scan::config::RunConfig,
    out: &CommandOutput,
    format: Format,
    run: RunInfo,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let config_toml = config.to_toml();
    let hash = config_hash(command, &config_toml);
    let mut files = Vec::new();
    for t in &out.tables {
        let file = format!("{}.{}", t.name, format.extension());
        let text = match format {
            Format::Csv => render_csv(t, command, &hash),
            Format::Json => render_json(t, command, &hash),
        };
        fs::write(dir.join(&file), text)?;
        files.push(FileEntry {
            path: file,
            rows: t.rows.len(),
            columns: t.columns.clone(),
        });
    }
    let manifest = RunManifest {
        tool: "polarmol".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        manifest_sha256: hash,
        config: serde_json::to_value(config).expect("config serializes"),
        config_toml,
        constants: Constants::default(),
        files,
        notes: out.notes.clone(),
        failures: out.failures.clone(),
        run,
    };
    let path = dir.join(format!("{command}.manifest.json"));
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}
