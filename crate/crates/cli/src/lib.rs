//! Chart files and the commands of the `zn-riemann` tool.

pub mod commands;
pub mod spec;

pub use commands::{error_json, full_suite, run_command, Command, Options, Outcome};
pub use spec::{ManifoldSpec, Model};
