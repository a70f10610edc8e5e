//! Experiment runner behind the `mpverify` binary.

pub mod app;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod simulate;
pub mod verify;

pub use error::CliError;
