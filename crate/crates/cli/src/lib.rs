//! Batch front-end for the HDG solver: named problems, single solves,
//! convergence tables and variational minimization.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;

pub use config::{Overrides, StudyConfig};
pub use error::CliError;
pub use run::{run_solve, run_study, run_variational, write_study, SolveReport, StudyRow, StudyTable, VariationalReport};
