//! Scenario runner and randomized verification suites for `spinorbit`.

pub mod runner;
pub mod scenario;
pub mod suites;

use std::path::PathBuf;

use thiserror::Error;

/// Every check passed.
pub const EXIT_PASS: i32 = 0;
/// At least one check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Bad arguments or scenario file.
pub const EXIT_USAGE: i32 = 2;
/// The integration stopped at a singularity; partial output was written.
pub const EXIT_SINGULARITY: i32 = 3;

/// Environment variable overriding the base output directory.
pub const OUT_DIR_ENV: &str = "SPINORBIT_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot encode report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}
