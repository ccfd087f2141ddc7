//! Command-line front end for the qlansim simulator.
//!
//! Four subcommands cover the workflows:
//!
//! - `run <scenario.toml>` executes one scenario file (`topology_demo`,
//!   `transduction_sweep`, `inter_qlan_demo`, or `oracle_audit`),
//! - `sweep` evaluates the strategy-contrast table over explicit
//!   efficiency axes with a resumable manifest,
//! - `export` renders built-in or re-imported topologies as DOT or
//!   edge-list files,
//! - `audit` cross-checks the rewrite engine against the reference
//!   simulators.
//!
//! Exit codes: 0 on success, 2 for configuration problems, 3 for runtime
//! or invariant failures. All randomness flows from one mandatory seed
//! through a splittable generator, so identical invocations produce
//! byte-identical output files.

pub mod audit;
pub mod error;
pub mod export;
pub mod outputs;
pub mod runner;
pub mod scenario;
pub mod sweep;

pub use error::{CliError, Result};
pub use outputs::OutputDir;
pub use runner::{run_scenario_file, Overrides, RunOutcome};
pub use scenario::Scenario;
