//! Cartesian parameter sweeps over a base scenario.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::scenario::Scenario;

/// One axis of a sweep: a scenario key and the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

/// Parse `g2=1,2,4;delta=0.1,0.2`. Keys without a dot refer to `model.*`.
pub fn parse_grid(spec: &str) -> Result<Vec<Axis>> {
    let mut axes = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, values) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("grid axis `{part}` is not `key=v1,v2,...`")))?;
        let key = key.trim();
        let key = if key.contains('.') || key == "task" { key.to_owned() } else { format!("model.{key}") };
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_owned()).collect();
        if values.iter().any(String::is_empty) {
            return Err(CliError::Usage(format!("grid axis `{key}` has an empty value")));
        }
        if axes.iter().any(|a: &Axis| a.key == key) {
            return Err(CliError::Usage(format!("grid axis `{key}` given twice")));
        }
        axes.push(Axis { key, values });
    }
    if axes.is_empty() {
        return Err(CliError::Usage("empty sweep grid".into()));
    }
    Ok(axes)
}

/// Every combination of axis values, first axis varying slowest.
pub fn grid_points(axes: &[Axis]) -> Vec<Vec<(String, String)>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut point = prefix.clone();
                    point.push((axis.key.clone(), v.clone()));
                    point
                })
            })
            .collect()
    })
}

/// Directory name for one point, e.g. `model.g2=2,model.delta=0.1`.
pub fn point_dir_name(point: &[(String, String)]) -> String {
    point.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Serialize)]
pub struct PointOutcome {
    pub dir: String,
    pub values: Vec<(String, String)>,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub axes: Vec<Axis>,
    pub points: Vec<PointOutcome>,
}

impl SweepSummary {
    pub fn failed(&self) -> usize {
        self.points.iter().filter(|p| p.exit_code != 0).count()
    }
}

fn run_point(base: &Scenario, point: &[(String, String)], out: &Path) -> PointOutcome {
    let dir = point_dir_name(point);
    let result = (|| {
        let mut s = base.clone();
        for (k, v) in point {
            s.set(k, v)?;
        }
        crate::run::execute(&s, &out.join(&dir)).map(|_| ())
    })();
    let (exit_code, error) = match result {
        Ok(()) => (0, None),
        Err(e) => (e.exit_code(), Some(e.to_string())),
    };
    PointOutcome { dir, values: point.to_vec(), exit_code, error }
}

/// Run every grid point in parallel. A failing point is recorded in
/// `summary.json` and does not stop the others.
pub fn run_sweep(base: &Scenario, axes: Vec<Axis>, out: &Path) -> Result<SweepSummary> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let points = grid_points(&axes);
    let points: Vec<PointOutcome> = points.par_iter().map(|p| run_point(base, p, out)).collect();
    let summary = SweepSummary { axes, points };
    let path = out.join("summary.json");
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(summary)
}
