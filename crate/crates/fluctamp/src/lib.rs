//! Command-line harness around [`fluctamp_core`]: emits the amplifier's gain
//! and fidelity curves, Wigner grids, detector-branch tables and optimization
//! sweeps as CSV or JSON, and cross-validates the phase-space engine against
//! closed forms and a number-basis simulator.
//!
//! Exit codes: 0 success, 1 invalid arguments, 2 validation failure, 3 I/O error.

pub mod cli;
pub mod commands;
pub mod error;
pub mod table;

pub use cli::{run, Cli, Command, Format};
pub use error::CliError;
pub use table::{Cell, Table};
