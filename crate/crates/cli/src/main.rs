//! `gaussian-esd`: evolution, sudden-death analysis, figure sweeps and
//! Fock-space cross-checks from a TOML run file.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gaussian_esd::par::with_workers;
use gaussian_esd::Execution;

use commands::{CliError, Outcome};
use config::{Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "gaussian-esd", version, about = "Entanglement sudden death of two-mode Gaussian states")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file, overriding `output.path`; `-` for stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,
    /// Output format, overriding `output.format`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps (default: available processors).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Overrides `time.t_max`.
    #[arg(long = "t-max", global = true, value_name = "X")]
    t_max: Option<f64>,
    /// Reserved; the dynamics are deterministic.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Print the resolved configuration and exit.
    #[arg(long = "dump-config", global = true)]
    dump_config: bool,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Moments and Simon quantity on a uniform time grid.
    Evolve,
    /// Sudden-death time, analytic and numeric.
    Esd,
    /// Sign grids and mixedness tables from the [sweep] section.
    Sweep,
    /// Compare the closed forms against the Fock-space integrator.
    OracleCheck,
    /// Print the resolved configuration.
    DumpConfig,
}

fn resolve_config(cli: &Cli, dumping: bool) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None if dumping => RunConfig::template(),
        None => return Err(CliError::Config("--config PATH is required".into())),
    };
    if let Some(out) = &cli.out {
        cfg.output.path = out.clone();
    }
    if let Some(format) = cli.format {
        cfg.output.format = format;
    }
    if let Some(t_max) = cli.t_max {
        cfg.time.t_max = t_max;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_table(cfg: &RunConfig, outcome: &Outcome) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Io(format!("cannot write {}: {e}", cfg.output.path));
    if cfg.output.path == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        outcome.table.write(cfg.output.format, &mut lock).map_err(io_err)?;
        lock.flush().map_err(io_err)
    } else {
        let file = File::create(&cfg.output.path).map_err(io_err)?;
        let mut w = BufWriter::new(file);
        outcome.table.write(cfg.output.format, &mut w).map_err(io_err)?;
        w.flush().map_err(io_err)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let dumping = cli.dump_config || cli.command == Some(Command::DumpConfig);
    let Some(command) = cli.command.or(dumping.then_some(Command::DumpConfig)) else {
        return Err(CliError::Config("no subcommand given; see --help".into()));
    };
    let cfg = resolve_config(&cli, dumping)?;
    if dumping {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    if cli.seed.is_some() {
        log::debug!("--seed is reserved and has no effect");
    }
    if cli.workers == Some(0) {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }
    let exec = Execution::default();
    let outcome = with_workers(cli.workers, || match command {
        Command::Evolve => commands::evolve(&cfg, exec),
        Command::Esd => commands::esd(&cfg),
        Command::Sweep => commands::sweep(&cfg, exec),
        Command::OracleCheck => commands::oracle_check(&cfg, exec),
        Command::DumpConfig => unreachable!("handled above"),
    })?;
    write_table(&cfg, &outcome)?;
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).format_timestamp(None).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
