//! Batch runner behind the `bootstrap` binary.
//!
//! Every invocation reads one TOML config, applies `--set` overrides, runs a
//! single mode and writes its artifacts plus `manifest.json` into the output
//! directory. Nothing is written when the run fails.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use serde::{Deserialize, Serialize};

pub use config::RunConfig;
pub use error::{CliError, EXIT_CODES};
pub use run::{execute, Artifact, Invocation, RunOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Grid scan over the free initial data.
    Scan,
    /// Grid scan followed by bisection of every island face.
    Refine,
    /// Finite-difference / Fourier eigenvalues.
    Oracle,
    /// Oracle moments substituted into the recursion equations.
    ResidualCheck,
    /// One bootstrap matrix at one point of initial data.
    MatrixDump,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Scan => "scan",
            Mode::Refine => "refine",
            Mode::Oracle => "oracle",
            Mode::ResidualCheck => "residual-check",
            Mode::MatrixDump => "matrix-dump",
        }
    }
}
