use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// A residual together with the tolerance it is judged against.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `value < tol`.
    pub fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { name: name.into(), value, tol, pass: value < tol, detail: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn failed(name: impl Into<String>, tol: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), value: f64::NAN, tol, pass: false, detail: Some(detail.into()) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub task: String,
    pub inputs: BTreeMap<String, String>,
    pub derived: Map<String, Value>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunReport {
    pub fn new(task: &str, inputs: BTreeMap<String, String>) -> Self {
        Self {
            task: task.to_owned(),
            inputs,
            derived: Map::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn derive(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.derived.insert(key.to_owned(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn write(&mut self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("report.json");
        self.outputs.push("report.json".into());
        let text = serde_json::to_string_pretty(self)?;
        let mut f = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        f.write_all(text.as_bytes()).and_then(|_| f.write_all(b"\n")).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a CSV table with a header row; numeric cells use [`fmt_float`].
pub fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<Cell>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn render(&self) -> String {
        match *self {
            Self::Int(i) => i.to_string(),
            Self::Float(x) => fmt_float(x),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Self::Int(n as i64)
    }
}
