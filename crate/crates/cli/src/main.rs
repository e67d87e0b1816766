use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use halfline_cli::config::RunConfig;
use halfline_cli::runner::{cmd_extremal, cmd_oracle, cmd_verify, Outcome};

/// Batch driver for the half-line Hardy/Rellich verification suite.
///
/// Exit codes: 0 all checks pass, 1 residual failure or bound violation,
/// 2 configuration error, 3 quadrature non-convergence or degenerate
/// Monte Carlo sampling.
#[derive(Parser)]
#[command(name = "halfline", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (default: available cores). Outputs do not depend
    /// on this.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pass threshold for equality residuals (overrides the config).
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the corpus x grid x identity sweep and write reports.
    Verify(Common),
    /// Run the sharpness explorer and write ratio traces.
    Extremal(Common),
    /// Cross-validate the polar reduction by Monte Carlo.
    Oracle(Common),
}

fn run(
    common: &Common,
    f: impl Fn(&RunConfig, &std::path::Path, Option<usize>) -> anyhow::Result<Outcome>,
) -> ExitCode {
    let mut cfg = match RunConfig::load(&common.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(tol) = common.tolerance {
        if !(tol > 0.0) {
            eprintln!("config error: --tolerance must be positive");
            return ExitCode::from(2);
        }
        cfg.tolerance = tol;
    }
    let out_dir = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output));
    match f(&cfg, &out_dir, common.jobs) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(c) => run(&c, cmd_verify),
        Command::Extremal(c) => run(&c, cmd_extremal),
        Command::Oracle(c) => run(&c, cmd_oracle),
    }
}
