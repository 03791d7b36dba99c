//! Batch front end for the `polarforge` library: design construction,
//! spectrum analysis, design-SNR sweeps, BLER simulation, oracle checks
//! and design comparison. Inputs come from flags or a JSON config; outputs
//! are JSON and CSV with an accompanying run manifest.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;

pub use args::Cli;
pub use commands::{run, DesignFile, Output};
pub use error::{CliError, CliResult};
