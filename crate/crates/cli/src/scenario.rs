//! Scenario files: flat `key = value` lines with dotted keys.
//!
//! ```text
//! # N-mode resonance
//! model.kind = N
//! model.omega = 1.0
//! model.delta = 0.4
//! model.g1 = 0.3
//! model.g2 = 2.0
//! model.dim = 48
//! task = resonance
//! task.case = I
//! task.m = 0
//! task.n = 1
//! task.free = omega_scaled
//! task.bracket = 1e-6, 0.05
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rabidress_core::algebra::AlgebraKind;
use rabidress_core::dynamics::{FreeParam, ResonanceCase};
use rabidress_core::ModelParams;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceSpec {
    pub case: ResonanceCase,
    pub m: usize,
    pub n: usize,
    pub free: FreeParam,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "task", rename_all = "lowercase")]
pub enum Task {
    Spectrum,
    Evolve {
        /// Initial dressed state `(lambda, n)`.
        initial: (i8, usize),
        t_end: f64,
        samples: usize,
        tol: f64,
    },
    Rabi {
        resonance: ResonanceSpec,
        /// Time span in units of the Rabi period.
        periods: f64,
        samples: usize,
        tol: f64,
    },
    Resonance(ResonanceSpec),
    Validate,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Evolve { .. } => "evolve",
            Self::Rabi { .. } => "rabi",
            Self::Resonance(_) => "resonance",
            Self::Validate => "validate",
        }
    }

    fn set_tol(&mut self, value: f64) {
        if let Self::Evolve { tol, .. } | Self::Rabi { tol, .. } = self {
            *tol = value;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub model: ModelParams,
    pub task: Task,
    /// Every key read from the file, in sorted order.
    pub entries: BTreeMap<String, String>,
}

pub const DEFAULT_TOL: f64 = 1e-8;
const DEFAULT_SAMPLES: usize = 201;

/// Keys understood by the parser.
const KNOWN_KEYS: &[&str] = &[
    "model.kind",
    "model.bargmann",
    "model.spin",
    "model.omega",
    "model.delta",
    "model.g1",
    "model.g2",
    "model.omega_e",
    "model.dim",
    "task",
    "task.case",
    "task.m",
    "task.n",
    "task.t_end",
    "task.samples",
    "task.tol",
    "task.free",
    "task.bracket",
    "task.initial",
    "task.periods",
];

struct Entries<'a> {
    path: &'a str,
    map: BTreeMap<String, (usize, String)>,
}

impl<'a> Entries<'a> {
    fn err(&self, key: &str, message: impl fmt::Display) -> CliError {
        let line = self.map.get(key).map_or(0, |(l, _)| *l);
        CliError::Parse { path: self.path.to_owned(), line, message: format!("`{key}`: {message}") }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.raw(key).ok_or_else(|| CliError::Parse {
            path: self.path.to_owned(),
            line: 0,
            message: format!("missing required key `{key}`"),
        })
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| self.err(key, e)),
        }
    }

    fn parse_required<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.required(key)?;
        Ok(self.parse(key)?.expect("checked above"))
    }

    fn pair(&self, key: &str) -> Result<Option<(String, String)>> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a, b] => Ok(Some((a.to_string(), b.to_string()))),
            _ => Err(self.err(key, "expected two comma-separated values")),
        }
    }
}

/// Parse scenario text. `path` only labels error messages.
pub fn parse_scenario(text: &str, path: &str) -> Result<Scenario> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Parse { path: path.into(), line: line_no, message: "expected `key = value`".into() });
        };
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Parse { path: path.into(), line: line_no, message: format!("unknown key `{key}`") });
        }
        if value.is_empty() {
            return Err(CliError::Parse { path: path.into(), line: line_no, message: format!("empty value for `{key}`") });
        }
        if map.insert(key.to_owned(), (line_no, value.to_owned())).is_some() {
            return Err(CliError::Parse { path: path.into(), line: line_no, message: format!("duplicate key `{key}`") });
        }
    }
    let entries = Entries { path, map };
    let model = parse_model(&entries)?;
    let task = parse_task(&entries)?;
    let flat = entries.map.iter().map(|(k, (_, v))| (k.clone(), v.clone())).collect();
    Ok(Scenario { model, task, entries: flat })
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_scenario(&text, &path.display().to_string())
}

fn parse_model(e: &Entries) -> Result<ModelParams> {
    let kind = match e.raw("model.kind").unwrap_or("N") {
        "N" | "n" | "oscillator" => AlgebraKind::Oscillator,
        "K" | "k" | "su11" => {
            let k: f64 = e.parse_required("model.bargmann")?;
            AlgebraKind::su11(k).map_err(|err| e.err("model.bargmann", err))?
        }
        "J" | "j" | "su2" => {
            let j: f64 = e.parse_required("model.spin")?;
            AlgebraKind::su2(j).map_err(|err| e.err("model.spin", err))?
        }
        other => return Err(e.err("model.kind", format!("unknown algebra `{other}` (expected N, K or J)"))),
    };
    let dim = match kind.natural_dim() {
        Some(d) => {
            if let Some(given) = e.parse::<usize>("model.dim")? {
                if given != d {
                    return Err(e.err("model.dim", format!("a spin mode has dimension {d}")));
                }
            }
            d
        }
        None => e.parse_required("model.dim")?,
    };
    Ok(ModelParams {
        omega: e.parse_required("model.omega")?,
        delta: e.parse("model.delta")?.unwrap_or(0.0),
        g1: e.parse("model.g1")?.unwrap_or(0.0),
        g2: e.parse("model.g2")?.unwrap_or(0.0),
        omega_e: e.parse("model.omega_e")?.unwrap_or(0.0),
        kind,
        dim,
    })
}

fn parse_resonance(e: &Entries) -> Result<ResonanceSpec> {
    let case = e.parse_required("task.case")?;
    let m = e.parse_required("task.m")?;
    let n = e.parse_required("task.n")?;
    let free = e.parse_required("task.free")?;
    let (lo, hi) = e.pair("task.bracket")?.ok_or_else(|| e.err("task.bracket", "required"))?;
    let parse = |s: &str| s.parse::<f64>().map_err(|err| e.err("task.bracket", err));
    Ok(ResonanceSpec { case, m, n, free, bracket: (parse(&lo)?, parse(&hi)?) })
}

fn parse_task(e: &Entries) -> Result<Task> {
    let samples = e.parse("task.samples")?.unwrap_or(DEFAULT_SAMPLES);
    let tol = e.parse("task.tol")?.unwrap_or(DEFAULT_TOL);
    let task = match e.required("task")? {
        "spectrum" => Task::Spectrum,
        "evolve" => {
            let (l, n) = e.pair("task.initial")?.unwrap_or(("1".into(), "0".into()));
            let lambda: i8 = l.parse().map_err(|err| e.err("task.initial", err))?;
            if lambda != 1 && lambda != -1 {
                return Err(e.err("task.initial", "branch must be 1 or -1"));
            }
            let n = n.parse().map_err(|err| e.err("task.initial", err))?;
            let t_end: f64 = e.parse_required("task.t_end")?;
            if !(t_end > 0.0 && t_end.is_finite()) {
                return Err(e.err("task.t_end", "time span must be positive"));
            }
            Task::Evolve { initial: (lambda, n), t_end, samples, tol }
        }
        "rabi" => {
            let periods: f64 = e.parse("task.periods")?.unwrap_or(2.0);
            if !(periods > 0.0 && periods.is_finite()) {
                return Err(e.err("task.periods", "time span must be positive"));
            }
            Task::Rabi { resonance: parse_resonance(e)?, periods, samples, tol }
        }
        "resonance" => Task::Resonance(parse_resonance(e)?),
        "validate" => Task::Validate,
        other => return Err(e.err("task", format!("unknown task `{other}`"))),
    };
    if samples < 2 {
        return Err(e.err("task.samples", "need at least two samples"));
    }
    Ok(task)
}

/// Command-line overrides applied after parsing.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub dim: Option<usize>,
}

impl Scenario {
    pub fn apply(&mut self, o: Overrides) -> Result<()> {
        if let Some(tol) = o.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
            }
            self.task.set_tol(tol);
            self.entries.insert("task.tol".into(), tol.to_string());
        }
        if let Some(dim) = o.dim {
            self.set("model.dim", &dim.to_string())?;
        }
        Ok(())
    }

    /// Override one key as if it had been written in the file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let mut entries = self.entries.clone();
        entries.insert(key.to_owned(), value.to_owned());
        let text: String = entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        *self = parse_scenario(&text, &format!("override {key}"))?;
        Ok(())
    }
}
