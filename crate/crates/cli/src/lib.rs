//! File formats, reports and the `simplext` command line on top of
//! `simplext-core`.

pub mod commands;
pub mod format;
pub mod report;
pub mod selftest;

pub use commands::{run, EXIT_CAP, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
