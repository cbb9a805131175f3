//! Scenario runner for the dressed two-level model: parsing, execution,
//! parameter sweeps and the invariant suite.

pub mod error;
pub mod report;
pub mod run;
pub mod scenario;
pub mod sweep;
pub mod validate;

pub use error::{CliError, Result};
pub use report::{Check, RunReport};
pub use run::execute;
pub use scenario::{load_scenario, parse_scenario, Overrides, Scenario, Task};
