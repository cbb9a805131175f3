use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rabidress_cli::report::RunReport;
use rabidress_cli::sweep::{parse_grid, run_sweep};
use rabidress_cli::{execute, load_scenario, validate, CliError, Overrides, Result};

/// Dressed-state dynamics of a two-level system coupled to a bosonic,
/// su(1,1) or su(2) mode. All frequencies and couplings are angular
/// frequencies (rad per unit time) with hbar = 1.
#[derive(Debug, Parser)]
#[command(name = "rabidress", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Integrator tolerance per output interval.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Mode truncation dimension (ignored by spin modes).
    #[arg(long, global = true)]
    dim: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario file.
    Run { scenario: PathBuf },
    /// Run a scenario over a Cartesian grid, e.g. `--grid "g2=1,2,4;delta=0.1,0.2"`.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        grid: String,
    },
    /// Run the built-in invariant suite.
    Validate,
}

fn print_report(report: &RunReport) {
    for c in &report.checks {
        println!("{} {}: {:e} (tol {:e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.tol);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let overrides = Overrides { tol: cli.global.tol, dim: cli.global.dim };
    match cli.command {
        Command::Run { scenario } => {
            let mut s = load_scenario(&scenario)?;
            s.apply(overrides)?;
            let report = execute(&s, &cli.global.out)?;
            print_report(&report);
        }
        Command::Sweep { scenario, grid } => {
            let axes = parse_grid(&grid)?;
            let mut s = load_scenario(&scenario)?;
            s.apply(overrides)?;
            let summary = run_sweep(&s, axes, &cli.global.out)?;
            for p in &summary.points {
                match &p.error {
                    None => println!("ok   {}", p.dir),
                    Some(e) => println!("fail {} (exit {}): {e}", p.dir, p.exit_code),
                }
            }
            if summary.failed() > 0 {
                return Err(CliError::Validation(format!("{} of {} points failed", summary.failed(), summary.points.len())));
            }
        }
        Command::Validate => {
            let checks = validate::suite();
            let report = RunReport { checks, ..RunReport::new("validate", Default::default()) };
            print_report(&report);
            if !report.passed() {
                return Err(CliError::Validation(format!("{} invariant(s) violated", report.failures().len())));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
