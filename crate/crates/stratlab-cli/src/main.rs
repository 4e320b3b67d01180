use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stratlab_cli::commands;
use stratlab_cli::config::parse_config_file;
use stratlab_cli::report::report;
use stratlab_cli::CliError;

#[derive(Parser, Debug)]
#[command(name = "stratlab", version, about = "Strongly stratified Boussinesq laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration (not needed for `report` with --output).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run directory; overrides output.dir.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides ic.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// (S_ε) run: trajectory, energy CSV and final checkpoint.
    Simulate,
    /// Limit flow ṽ^h and θ̃.
    Limit,
    /// Difference system for D_ε.
    Diff,
    /// ε-sweep of the oscillating-part norms.
    Sweep,
    /// Dispersion integrals and their decay fits.
    Dispersion,
    /// Kernel supremum decay.
    Kernel,
    /// Re-read a run directory and check every artifact.
    Report,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    }
    if cli.command == Command::Report && cli.config.is_none() {
        let dir = cli.output.ok_or_else(|| {
            CliError::Io("report needs --output <dir> or --config".into())
        })?;
        return report(&dir).map(|_| ());
    }
    let path = cli
        .config
        .ok_or_else(|| CliError::Io("--config <path> is required".into()))?;
    let parsed = parse_config_file(&path)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let mut cfg = parsed.config;
    if let Some(s) = cli.seed {
        cfg.ic.seed = s;
    }
    let dir = commands::output_dir(&cfg, cli.output.as_deref());
    if cli.command == Command::Report {
        return report(&dir).map(|_| ());
    }
    commands::prepare(&cfg, &dir)?;
    match cli.command {
        Command::Simulate => commands::simulate(&cfg, &dir),
        Command::Limit => commands::limit(&cfg, &dir),
        Command::Diff => commands::diff(&cfg, &dir),
        Command::Sweep => commands::sweep(&cfg, &dir),
        Command::Dispersion => commands::dispersion(&cfg, &dir),
        Command::Kernel => commands::kernel(&cfg, &dir),
        Command::Report => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
