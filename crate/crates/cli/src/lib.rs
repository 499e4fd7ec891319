//! Library side of the `tvgp` binary: configuration parsing and the
//! command implementations, kept callable so the test suites can drive
//! whole pipeline runs in-process.

pub mod commands;
pub mod config;

pub use commands::{
    cmd_analyze, cmd_convert_units, cmd_fit, cmd_predict, cmd_simulate, load_design, load_tensor,
};
pub use config::RunConfig;
