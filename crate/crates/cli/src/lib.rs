//! File formats and subcommands behind the `rank3eq` binary.

pub mod commands;
pub mod instance;
pub mod report;

pub use instance::{InputError, InstanceFile, MetricSpec};
pub use report::ReportFile;
