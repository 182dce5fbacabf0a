//! Command-line front end: loads a scenario config, dispatches one of the
//! six commands and writes deterministic CSV/JSON outputs plus a sidecar
//! metadata file.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration ({field}): {message}")]
    Validation { field: String, message: String },
    #[error(transparent)]
    Core(#[from] tdtunnel_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 = validation error, 2 = numerical failure.
    fn exit_code(&self) -> u8 {
        use tdtunnel_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } => 1,
            CliError::Core(e) => match e {
                E::ConvergenceFailure { .. }
                | E::NumericalBlowup { .. }
                | E::SingularOverlap { .. }
                | E::PrematureMeasurement { .. } => 2,
                _ => 1,
            },
            CliError::Io(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "tdtunnel",
    about = "Quantum tunnelling under a time-dependent measurement perturbation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration file (section.key = value format).
    #[arg(long)]
    config: PathBuf,
    /// Output file prefix; overrides output.prefix from the config.
    #[arg(long)]
    out: Option<String>,
    /// Reserved for future randomized commands; recorded in the sidecar.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Wave vectors, matched amplitudes, overlap/transition matrices and
    /// coupling frequencies as a JSON record.
    Model(RunArgs),
    /// In-barrier density grid and its envelope as CSV tables.
    Density(RunArgs),
    /// All four tunnelling-time estimates as a JSON record.
    Times(RunArgs),
    /// Reference wave-packet propagation diagnostics (and optional
    /// snapshots).
    Oracle(RunArgs),
    /// Stop-time scan over barrier lengths as CSV.
    HartmanScan(RunArgs),
    /// Side-by-side analytic vs propagated density and transmission
    /// summary.
    Compare(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Model(_) => "model",
            Command::Density(_) => "density",
            Command::Times(_) => "times",
            Command::Oracle(_) => "oracle",
            Command::HartmanScan(_) => "hartman-scan",
            Command::Compare(_) => "compare",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Model(a)
            | Command::Density(a)
            | Command::Times(a)
            | Command::Oracle(a)
            | Command::HartmanScan(a)
            | Command::Compare(a) => a,
        }
    }
}

fn run(cmd: &Command) -> Result<(), CliError> {
    let args = cmd.args();
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::Validation {
        field: "config".into(),
        message: format!("cannot read {}: {e}", args.config.display()),
    })?;
    let mut cfg = config::parse_config(&text)?;
    if let Some(out) = &args.out {
        cfg.output_prefix = out.clone();
    }

    let files = match cmd {
        Command::Model(_) => commands::model(&cfg)?,
        Command::Density(_) => commands::density(&cfg)?,
        Command::Times(_) => commands::times(&cfg)?,
        Command::Oracle(_) => commands::oracle(&cfg)?,
        Command::HartmanScan(_) => commands::hartman_scan(&cfg)?,
        Command::Compare(_) => commands::compare(&cfg)?,
    };

    for (suffix, contents) in &files {
        let path = format!("{}.{suffix}", cfg.output_prefix);
        std::fs::write(&path, contents)?;
        println!("wrote {path}");
    }
    output::write_sidecar(
        &cfg.output_prefix,
        cmd.name(),
        &args.config,
        args.seed,
        &config::to_text(&cfg),
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
