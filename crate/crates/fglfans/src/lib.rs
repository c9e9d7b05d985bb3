//! File formats, the bundled corpus and the command implementations behind
//! the `fglfans` binary.
//!
//! Every command returns its report as a string together with an exit code:
//! 0 on success, 2 for bad input, 3 for an inconsistent configuration and 4
//! when a computed invariant fails.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod fanfile;
pub mod selftest;

use std::fmt::Display;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: String) -> Self {
        CliError { code: 2, message }
    }

    pub fn config(message: String) -> Self {
        CliError { code: 3, message }
    }

    pub fn internal(e: impl Display) -> Self {
        CliError { code: 4, message: e.to_string() }
    }
}
