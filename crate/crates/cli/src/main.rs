//! Command-line runner for sweeps and canned demos.

use std::path::PathBuf;
use std::process::ExitCode;

use adiabatic_core::config::parse_config;
use adiabatic_core::sweep::{run_failure_demo, run_sweep, write_csv_file};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adiabatic", version, about = "Adiabatic ground-state search on a truncated number basis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (x_min, T) row of a config and write a CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; defaults to the config's `output` key.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; overrides the config's `workers` key.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a named scenario, print the bound chain and write a CSV.
    Demo {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep { config, out, workers } => {
            let mut cfg = parse_config(&read(&config)?)?;
            if let Some(w) = workers {
                anyhow::ensure!(w >= 1, "--workers must be at least 1");
                cfg.workers = w;
            }
            let out = out
                .or_else(|| cfg.output.clone())
                .context("no output path: pass --out or set `output` in the config")?;
            let rows = run_sweep(&cfg)?;
            write_csv_file(&rows, &out).with_context(|| format!("writing {}", out.display()))?;
            let failed = rows.iter().filter(|r| !r.status.is_ok()).count();
            println!("{} rows written to {} ({failed} not ok)", rows.len(), out.display());
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Demo { preset, out } => {
            let demo = run_failure_demo(&preset)?;
            print!("{}", demo.report);
            write_csv_file(&demo.sweep_rows(), &out).with_context(|| format!("writing {}", out.display()))?;
            Ok(if demo.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Validate { config } => match parse_config(&read(&config)?) {
            Ok(cfg) => {
                let rows = match &cfg.potential {
                    adiabatic_core::config::PotentialSpec::Delta { x_mins } => x_mins.len() * cfg.total_times.len(),
                    _ => cfg.total_times.len(),
                };
                println!("config ok: dim={} H_I={} rows={rows}", cfg.dim, cfg.hi_kind);
                Ok(ExitCode::SUCCESS)
            }
            Err(e) => {
                eprintln!("{e}");
                Ok(ExitCode::from(2))
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
