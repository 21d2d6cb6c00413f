//! File formats, Monte Carlo sweeps and command implementations around `holotrace-core`.
//!
//! The `holotrace` binary is a thin argument parser over [`commands`]; everything it writes
//! is described in the README.

pub mod commands;
pub mod config;
pub mod dump;
pub mod error;
pub mod output;
pub mod sweep;

pub use error::{AppError, AppResult};
