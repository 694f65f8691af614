//! File formats and command-line front end for `airoyalties-core`.
//!
//! - [`embedstore`]: line-delimited JSON embedding files
//! - [`cases`]: the rulings CSV
//! - [`config`]: TOML scenario configs for the compensation simulator
//! - [`influence_csv`]: influence matrices as CSV
//! - [`report`]: CSV and table rendering of compensation reports
//! - [`commands`]: one function per CLI subcommand

pub mod cases;
pub mod commands;
pub mod config;
pub mod embedstore;
pub mod influence_csv;
pub mod report;

pub use airoyalties_core as core;
