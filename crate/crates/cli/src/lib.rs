//! Config-driven experiment runner: builds a problem, solver and stepsize
//! from a TOML document, runs it, evaluates the requested checks and writes a
//! CSV trace and a JSON report.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod experiment;
pub mod output;

pub use error::CliError;
