//! Execution of a single scenario into an output directory.

use std::fs;
use std::path::Path;

use rabidress_core::algebra::{CVec, LEAKAGE_TOL};
use rabidress_core::dressing::{build_frame, transition_table, DressedFrame, EIGEN_TOL, ORTHO_TOL};
use rabidress_core::dynamics::{
    assemble_full_state, find_resonance, resonant_initial_amplitudes, rwa_validity, transfer_probability, u0_apply,
    ResonanceSolution, ThetaDrive, TwoLevelBlock, RESONANCE_TOL, RWA_THRESHOLD,
};
use rabidress_core::oracle::{dressed_populations, estimate_period, integrate, uniform_grid, StepControl};
use rabidress_core::{full_hamiltonian, Error as CoreError, ModelParams};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::report::{write_csv, Cell, Check, RunReport};
use crate::scenario::{ResonanceSpec, Scenario, Task};
use crate::validate;

/// Largest accepted `|norm - 1|` along an integrated trajectory.
const NORM_TOL: f64 = 1e-9;
/// Zero-splitting runs must stay this close to `U0(t) psi0`.
const EXACT_SECTOR_TOL: f64 = 1e-7;
/// Relative period mismatch accepted by the Rabi comparison.
pub const PERIOD_TOL: f64 = 0.02;
/// Peak-population mismatch accepted by the Rabi comparison.
pub const PEAK_TOL: f64 = 0.05;

/// Run `scenario`, writing its CSV output and `report.json` into `out`.
///
/// Output files are written before any failing check turns into an error,
/// so a failed run still leaves its evidence behind.
pub fn execute(scenario: &Scenario, out: &Path) -> Result<RunReport> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut report = RunReport::new(scenario.task.name(), scenario.entries.clone());
    match &scenario.task {
        Task::Spectrum => spectrum(&scenario.model, out, &mut report)?,
        Task::Evolve { initial, t_end, samples, tol } => {
            evolve(&scenario.model, *initial, *t_end, *samples, *tol, out, &mut report)?
        }
        Task::Rabi { resonance, periods, samples, tol } => {
            rabi(&scenario.model, resonance, *periods, *samples, *tol, out, &mut report)?
        }
        Task::Resonance(spec) => resonance(&scenario.model, spec, &mut report)?,
        Task::Validate => report.checks = validate::suite(),
    }
    report.write(out)?;
    verdict(&report)?;
    Ok(report)
}

/// Leakage failures map to [`CoreError::TruncationLeakage`], anything else to
/// [`CliError::Validation`].
fn verdict(report: &RunReport) -> Result<()> {
    let failures = report.failures();
    if let Some(leak) = failures.iter().find(|c| c.name.contains("leakage")) {
        return Err(CoreError::TruncationLeakage { leakage: leak.value, tol: leak.tol }.into());
    }
    if failures.is_empty() {
        return Ok(());
    }
    let names: Vec<String> = failures.iter().map(|c| format!("{} ({:e} vs {:e})", c.name, c.value, c.tol)).collect();
    Err(CliError::Validation(names.join(", ")))
}

fn frame_checks(frame: &DressedFrame, report: &mut RunReport) {
    let trusted = &frame.checks[..=frame.n_max];
    let eig = trusted.iter().map(|c| c.eigen_residual).fold(0.0, f64::max);
    let leak = trusted.iter().map(|c| c.leakage).fold(0.0, f64::max);
    report.checks.push(Check::below("dressed eigen residual", eig, EIGEN_TOL));
    report.checks.push(Check::below("dressed state leakage", leak, LEAKAGE_TOL));
    report.checks.push(Check::below("dressed orthonormality", frame.orthonormality_defect, ORTHO_TOL));
}

fn frame_summary(frame: &DressedFrame, report: &mut RunReport) -> Result<()> {
    report.derive("big_omega", frame.big_omega)?;
    report.derive("x", frame.x)?;
    report.derive("n_max", frame.n_max)
}

fn spectrum(model: &ModelParams, out: &Path, report: &mut RunReport) -> Result<()> {
    let frame = build_frame(model)?;
    let table = transition_table(&frame)?;
    let top = frame.n_max.min(table.n_max);
    let header = ["n", "E_n", "E_n_delta"].map(String::from);
    let rows = (0..=top)
        .map(|n| Ok(vec![Cell::from(n), frame.energy(n)?.into(), table.e_delta(n)?.into()]))
        .collect::<std::result::Result<Vec<_>, CoreError>>()?;
    write_csv(&out.join("spectrum.csv"), &header, rows)?;
    report.outputs.push("spectrum.csv".into());

    frame_summary(&frame, report)?;
    report.derive("table_n_max", table.n_max)?;
    let blocks = (0..=top)
        .map(|n| Ok(TwoLevelBlock::new(n, table.e_delta(n)?, model.g2)))
        .collect::<std::result::Result<Vec<_>, CoreError>>()?;
    report.derive("levels", blocks)?;
    frame_checks(&frame, report);
    report.checks.push(Check::below("transition table imaginary part", table.imag_defect, 1e-10));
    Ok(())
}

fn control_for(model: &ModelParams, tol: f64) -> StepControl {
    let control = StepControl::default().with_tol(tol);
    if model.kind.is_truncated() {
        control.with_mode_dim(model.dim)
    } else {
        control
    }
}

fn population_header(labels: &[(i8, usize)]) -> Vec<String> {
    let mut header = vec!["t".to_owned()];
    header.extend(labels.iter().map(|&(l, n)| format!("p_{}_{n}", if l > 0 { "plus" } else { "minus" })));
    header.push("untracked".into());
    header
}

#[allow(clippy::too_many_arguments)]
fn evolve(
    model: &ModelParams,
    (lambda, n): (i8, usize),
    t_end: f64,
    samples: usize,
    tol: f64,
    out: &Path,
    report: &mut RunReport,
) -> Result<()> {
    let frame = build_frame(model)?;
    let psi0 = frame.state(lambda, n)?;
    let ham = full_hamiltonian(model)?;
    let grid = uniform_grid(t_end, samples)?;
    let traj = integrate(&ham, &psi0, &grid, control_for(model, tol))?;
    let pops = dressed_populations(&traj, &frame)?;

    let rows = pops.values.iter().zip(&pops.times).zip(&pops.untracked).map(|((row, &t), &u)| {
        let mut cells = vec![Cell::from(t)];
        cells.extend(row.iter().map(|&p| Cell::from(p)));
        cells.push(u.into());
        cells
    });
    write_csv(&out.join("populations.csv"), &population_header(&pops.labels), rows)?;
    report.outputs.push("populations.csv".into());

    frame_summary(&frame, report)?;
    report.derive("integrator", &traj.meta)?;
    report.derive("completeness_defect", pops.completeness_defect)?;
    frame_checks(&frame, report);
    report.checks.push(Check::below("norm drift", traj.max_norm_drift(), NORM_TOL));
    let tail = traj.leakage.iter().copied().fold(0.0, f64::max);
    report.checks.push(Check::below("trajectory tail leakage", tail, LEAKAGE_TOL));
    if pops.flagged {
        report.warnings.push("state left the trusted dressed subspace".into());
    }
    if model.delta == 0.0 {
        let drive = ThetaDrive::from(&frame);
        let dist = grid
            .iter()
            .zip(&traj.states)
            .map(|(&t, s)| (s - u0_apply(t, &frame, drive, &psi0)).norm())
            .fold(0.0, f64::max);
        report.checks.push(Check::below("distance to U0 psi0", dist, EXACT_SECTOR_TOL));
    }
    Ok(())
}

fn solve(model: &ModelParams, spec: &ResonanceSpec) -> Result<ResonanceSolution> {
    Ok(find_resonance(spec.case, spec.m, spec.n, model, spec.free, spec.bracket)?)
}

fn resonance_checks(sol: &ResonanceSolution, report: &mut RunReport) -> Result<()> {
    let r = rwa_validity(sol);
    report.derive("solution", sol)?;
    report.derive("rwa_ratio", r)?;
    if sol.rabi_frequency != 0.0 {
        report.derive("rabi_period", sol.rabi_period())?;
    }
    report.warnings.extend(sol.warnings.iter().cloned());
    report.checks.push(Check::below("resonance residual", sol.residual.abs(), RESONANCE_TOL));
    report.checks.push(Check::below("rotating-wave ratio", r, RWA_THRESHOLD));
    Ok(())
}

fn resonance(model: &ModelParams, spec: &ResonanceSpec, report: &mut RunReport) -> Result<()> {
    let sol = solve(model, spec)?;
    resonance_checks(&sol, report)
}

/// Analytic transfer probability against the brute-force population of the
/// target level, sampled on a uniform grid.
#[derive(Debug, Clone, Serialize)]
pub struct RabiComparison {
    pub times: Vec<f64>,
    pub analytic: Vec<f64>,
    pub oracle: Vec<f64>,
    pub predicted_period: f64,
    /// `None` when the oracle curve shows fewer than two upward crossings.
    pub oracle_period: Option<f64>,
    pub oracle_peak: f64,
    pub max_abs_diff: f64,
    pub max_leakage: f64,
}

impl RabiComparison {
    pub fn period_error(&self) -> f64 {
        self.oracle_period.map_or(f64::INFINITY, |p| (p - self.predicted_period).abs() / self.predicted_period)
    }

    pub fn peak_error(&self) -> f64 {
        (self.oracle_peak - 1.0).abs()
    }
}

/// Integrate the full model from the resonant initial state of `sol` over
/// `periods` Rabi periods.
pub fn compare_rabi(sol: &ResonanceSolution, periods: f64, samples: usize, tol: f64) -> Result<RabiComparison> {
    if sol.rabi_frequency == 0.0 {
        return Err(CoreError::InvalidParameter {
            name: "case",
            reason: format!("case {} has no coupling between levels {} and {}", sol.case, sol.m, sol.n),
        }
        .into());
    }
    let frame = build_frame(&sol.params)?;
    let amplitudes = resonant_initial_amplitudes(sol);
    let psi0: CVec = assemble_full_state(0.0, &frame, sol, &amplitudes)?;
    let ham = full_hamiltonian(&sol.params)?;
    let predicted_period = sol.rabi_period();
    let grid = uniform_grid(periods * predicted_period, samples)?;
    let traj = integrate(&ham, &psi0, &grid, control_for(&sol.params, tol))?;
    let pops = dressed_populations(&traj, &frame)?;
    let oracle = pops.level(sol.n);
    let analytic: Vec<f64> = grid.iter().map(|&t| transfer_probability(sol, t)).collect();
    let max_abs_diff = oracle.iter().zip(&analytic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let max_leakage = traj.leakage.iter().chain(&pops.untracked).copied().fold(0.0, f64::max);
    Ok(RabiComparison {
        oracle_period: estimate_period(&grid, &oracle),
        oracle_peak: oracle.iter().copied().fold(0.0, f64::max),
        times: grid,
        analytic,
        oracle,
        predicted_period,
        max_abs_diff,
        max_leakage,
    })
}

#[allow(clippy::too_many_arguments)]
fn rabi(
    model: &ModelParams,
    spec: &ResonanceSpec,
    periods: f64,
    samples: usize,
    tol: f64,
    out: &Path,
    report: &mut RunReport,
) -> Result<()> {
    let sol = solve(model, spec)?;
    resonance_checks(&sol, report)?;
    let cmp = compare_rabi(&sol, periods, samples, tol)?;

    let header = ["t", "p_analytic", "p_oracle", "abs_diff"].map(String::from);
    let rows = cmp
        .times
        .iter()
        .zip(cmp.analytic.iter().zip(&cmp.oracle))
        .map(|(&t, (&a, &o))| vec![t.into(), a.into(), o.into(), (a - o).abs().into()]);
    write_csv(&out.join("rabi.csv"), &header, rows)?;
    report.outputs.push("rabi.csv".into());

    report.derive("oracle_period", cmp.oracle_period)?;
    report.derive("oracle_peak", cmp.oracle_peak)?;
    report.derive("max_abs_diff", cmp.max_abs_diff)?;
    report.checks.push(Check::below("relative period error", cmp.period_error(), PERIOD_TOL));
    report.checks.push(Check::below("peak population error", cmp.peak_error(), PEAK_TOL));
    report.checks.push(Check::below("oracle leakage", cmp.max_leakage, LEAKAGE_TOL));
    Ok(())
}
