//! Command-line front end: instance files, generation, reports, commands.

mod commands;
pub mod format;
pub mod generate;
pub mod report;

pub use commands::{run, Cli, EXIT_VIOLATION};
pub use format::{parse_classic_format, parse_instance, read_instance, write_native, InstanceFormat};
pub use generate::{generate, GenMode};
pub use report::{read_report, write_report};
