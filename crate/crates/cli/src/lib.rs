//! Command-line front end for the `magtele` teleportation library: run
//! configs, parameter sweeps, figure datasets and the oracle validation
//! report.

// `!(x <= tol)` is written on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod sweep;
pub mod validate;

pub use config::RunConfig;
pub use error::CliError;
pub use figures::{emit_figure, figure_config, FigureId};
pub use sweep::{run_sweep, OutputRecord};
pub use validate::{validate_report, ValidationReport};
