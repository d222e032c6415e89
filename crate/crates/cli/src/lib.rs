//! Std companion to `edgeworth-core`: spec files, CSV output with run
//! manifests, the Monte Carlo and FFT convolution oracles, and the
//! subcommands behind the `edgeworth` binary.

pub mod commands;
pub mod config;
pub mod conv;
pub mod manifest;
pub mod mc;

use std::fmt;

/// Failure classes, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed spec file, manifest or flag value (exit 2).
    Parse(String),
    /// A precondition of the math was violated (exit 3).
    Domain(String),
    /// Quadrature ran out of panels (exit 4).
    Quadrature(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Quadrature(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "config error: {m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Quadrature(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<edgeworth_core::Error> for CliError {
    fn from(e: edgeworth_core::Error) -> Self {
        match e {
            edgeworth_core::Error::QuadratureNonConvergence { .. } => CliError::Quadrature(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Worker count from `EDGEWORTH_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("EDGEWORTH_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// A rayon pool honoring `EDGEWORTH_THREADS`.
pub fn pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}
