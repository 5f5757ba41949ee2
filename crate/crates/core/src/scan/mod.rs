//! Batch front end: `polarmol <command> --config run.toml --out dir`.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use config::RunConfig;
use output::{write_all, CommandOutput, Format, RunInfo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Single-molecule levels and dipole moments against beta.
    Stark,
    /// Bare or dressed pair surfaces.
    Surfaces,
    /// Effective 2D potential or transverse bands.
    Eff2d,
    /// Minimal-action sweep against omega_perp/omega_c.
    Instanton,
    /// Coefficient tables, analytic and fitted side by side.
    Tables,
    /// Characteristic length, energy and frequency scales.
    Scales,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Stark => "stark",
            Command::Surfaces => "surfaces",
            Command::Eff2d => "eff2d",
            Command::Instanton => "instanton",
            Command::Tables => "tables",
            Command::Scales => "scales",
        }
    }

    pub fn run(self, cfg: &RunConfig) -> Result<CommandOutput> {
        match self {
            Command::Stark => commands::stark(cfg),
            Command::Surfaces => commands::surfaces(cfg),
            Command::Eff2d => commands::eff2d(cfg),
            Command::Instanton => commands::instanton(cfg),
            Command::Tables => commands::tables(cfg),
            Command::Scales => commands::scales(cfg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "polarmol",
    version,
    about = "Interaction potentials of cold polar molecules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_CONVERGENCE: u8 = 3;
pub const EXIT_PARTIAL: u8 = 4;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Convergence { .. } | Error::Instanton { .. } => EXIT_CONVERGENCE,
        Error::Config(_) | Error::Domain(_) | Error::Io(_) => EXIT_CONFIG,
    }
}

/// Run one command and write its files; returns the number of failed points.
pub fn execute(
    command: Command,
    cfg: &RunConfig,
    out_dir: &Path,
    threads: usize,
    format: Format,
) -> Result<usize> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("threads: {e}")))?;
    let start = Instant::now();
    let out = pool.install(|| command.run(cfg))?;
    let run = RunInfo {
        wall_time_s: start.elapsed().as_secs_f64(),
        threads: pool.current_num_threads(),
    };
    write_all(out_dir, command.name(), cfg, &out, format, run)?;
    Ok(out.failures.len())
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("polarmol: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    match execute(cli.command, &cfg, &out_dir, cli.threads, cli.format) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!(
                "polarmol: {n} points failed, see {}.manifest.json",
                cli.command.name()
            );
            ExitCode::from(EXIT_PARTIAL)
        }
        Err(e) => {
            eprintln!("polarmol: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
