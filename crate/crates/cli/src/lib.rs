//! Command-line front end: argument parsing, reports and the persistent cache.

pub mod app;
pub mod cache;

pub use app::{run, Cli};
