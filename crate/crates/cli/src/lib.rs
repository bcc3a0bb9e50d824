//! Batch driver for the edlforge verifications.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run, Command};
pub use config::RunConfig;
pub use report::Report;
