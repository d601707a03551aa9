//! Command-line front end for `fabnet-core`: configuration files, CSV and
//! binary outputs, run manifests and parallel sweep drivers.

pub mod config;
pub mod io;
pub mod manifest;
pub mod run;

use std::fmt;

/// Bad flags, unreadable or invalid configuration. Exits with status 2;
/// every other failure exits with status 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Wraps any error as a [`UsageError`].
pub fn usage(e: impl fmt::Display) -> anyhow::Error {
    UsageError(format!("{e:#}")).into()
}

pub fn exit_code(e: &anyhow::Error) -> i32 {
    if e.chain().any(|c| c.is::<UsageError>()) {
        2
    } else {
        1
    }
}
