use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pinlock::Tolerances;
use pinlock_cli::{run, Command, Job};

/// Pinning-control design, synchronization analysis and attack games.
///
/// Exit status: 0 on success (synchronized / solved), 2 when the answer is
/// negative (not synchronized, infeasible, unbounded, degenerate game), 1 on error.
/// `PINLOCK_TOL` overrides solver tolerances, e.g. `PINLOCK_TOL=cut_violation=1e-8,max_cuts=800`.
#[derive(Debug, Parser)]
#[command(name = "pinlock", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Job file (JSON), or `builtin:paper-fig2` / `builtin:paper-game`.
    #[arg(long)]
    config: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override a config entry, e.g. `--set dynamics.c=100` or `--set beta.3=1.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match Tolerances::from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: PINLOCK_TOL: {e}");
            return ExitCode::from(1);
        }
    };
    let job = Job { command: cli.command, config: cli.config, out_dir: cli.out, overrides: cli.overrides };
    match run(&job, &tol) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
