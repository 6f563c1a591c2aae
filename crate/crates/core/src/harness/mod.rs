//! Configuration, initial data, ε-sweeps, oracle comparison and file output.

pub mod config;
pub mod initial;
pub mod output;
pub mod sweep;

pub use config::{RunConfig, SweepSettings};
pub use initial::{build_initial, InitialData};
pub use sweep::{compare_to_oracle, ensemble, run_config, sweep, RunOutcome, RunSummary, SweepReport, SweepRow};
