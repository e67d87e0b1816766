//! Library surface of the batch driver; the binary in main.rs is a thin
//! wrapper so integration tests can reach the config schema and runner.

pub mod config;
pub mod runner;
