//! Experiment harness for `logse-core`.
//!
//! One invocation runs one experiment: `logse-lab <command> [--config PATH]
//! [--key value ...]`. Configuration is a flat `key = value` file; flags
//! override file entries. Outputs go to `output.dir`:
//!
//! | file | content |
//! |------|---------|
//! | `report.csv` | refinement table (`converge-time`, `converge-space`, `truncation`) |
//! | `series.csv` | `step,t,mass,energy,linf` (`simulate`) |
//! | `snap_<step>.bin` | field snapshots (`simulate`, when `output.snapshot_stride > 0`) |
//! | `properties.txt` | one `PASS`/`FAIL` line per property (`properties`) |
//!
//! Exit codes: 0 success, 1 invalid input or I/O failure, 2 numerical
//! divergence, 3 acceptance-window failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod snapshot;

pub use commands::{run, Outcome};
pub use config::{Command, ExperimentConfig, Scenario};
pub use error::{CliError, CliResult};
