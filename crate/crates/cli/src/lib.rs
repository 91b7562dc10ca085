//! Scenario-driven sweeps over the teleportation model: TOML scenarios in,
//! CSV or JSON tables out.

pub mod emit;
pub mod error;
pub mod observables;
pub mod scenario;
pub mod sweep;
pub mod verify;

pub use emit::{emit, parse_json, Format, Table};
pub use error::{CliError, Result};
pub use observables::{Evaluation, Observable, ObservableRegistry};
pub use scenario::Scenario;
pub use sweep::{run_scenario, run_scenario_with_jobs, SweepResult};
