use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qm_bootstrap_cli::{execute, Invocation, Mode, EXIT_CODES};

/// Moment-bootstrap scans, oracle solves and residual checks driven by a
/// TOML config.
#[derive(Debug, Parser)]
#[command(name = "bootstrap", version, after_help = EXIT_CODES)]
struct Args {
    #[arg(value_enum)]
    mode: Mode,
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override one config key, e.g. `--set scan.depth=6` or
    /// `--set scan.axis.0.step=0.001`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Scan worker threads (default: all cores).
    #[arg(long, env = "BOOTSTRAP_WORKERS")]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let inv = Invocation {
        mode: args.mode,
        config: args.config,
        overrides: args.set,
        out: args.out,
        workers: args.workers,
    };
    match execute(&inv) {
        Ok(out) => {
            // stdout may be a closed pipe
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", out.summary);
            for a in &out.artifacts {
                let _ = writeln!(stdout, "wrote {}", inv.out.join(&a.name).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
