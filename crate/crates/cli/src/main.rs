//! `pilotwave`: simulate the stochastic walker and run its diagnostics.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 failed assumption check, 5 file error.

mod commands;
mod config;
mod failure;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toml::Value;

use config::{parse_override, RunConfig, DEFAULT_TOML, FULL_T_MAX};
use failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "pilotwave", version, about = "Stochastic pilot-wave walker with path memory")]
struct Cli {
    /// Run configuration (TOML, flat dotted keys); missing keys take the built-in defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one configuration key; repeatable, the last one wins.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Random seed (overrides `sim.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Production length: sim.t_max = 1e5 unless set explicitly with --set.
    #[arg(long, global = true)]
    full: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one trajectory and write it as CSV.
    Simulate,
    /// Find the circular orbits of the noiseless model.
    Orbit,
    /// Radial position density of a run (or of --input).
    Pdf {
        /// Analyse an existing trajectory CSV instead of simulating.
        #[arg(long, value_name = "CSV")]
        input: Option<PathBuf>,
    },
    /// Ensemble energy moments and the fourth-order structure function.
    Moments {
        /// Analyse an existing trajectory CSV instead of simulating.
        #[arg(long, value_name = "CSV")]
        input: Option<PathBuf>,
    },
    /// Two runs with the same noise from different pasts.
    Couple,
    /// Check the structural hypotheses on the model ingredients.
    Verify,
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let (text, origin) = match &cli.config {
        Some(path) => (fs::read_to_string(path).map_err(|e| Failure::io(path, e))?, path.display().to_string()),
        None => (DEFAULT_TOML.to_string(), "default config".to_string()),
    };
    let mut overrides = Vec::new();
    if cli.full {
        overrides.push(("sim.t_max".to_string(), Value::Float(FULL_T_MAX)));
    }
    for arg in &cli.set {
        overrides.push(parse_override(arg)?);
    }
    if let Some(seed) = cli.seed {
        let seed = i64::try_from(seed).map_err(|_| Failure::key("sim.seed", "--seed must be below 2^63"))?;
        overrides.push(("sim.seed".to_string(), Value::Integer(seed)));
    }
    if let Some(dir) = &cli.out {
        overrides.push(("output.dir".to_string(), Value::String(dir.to_string_lossy().into_owned())));
    }
    RunConfig::assemble(&text, &origin, &overrides)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Simulate => commands::simulate_cmd(&cfg),
        Command::Orbit => commands::orbit(&cfg),
        Command::Pdf { input } => commands::pdf(&cfg, input.as_deref()),
        Command::Moments { input } => commands::moments(&cfg, input.as_deref()),
        Command::Couple => commands::couple(&cfg),
        Command::Verify => commands::verify(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // a panic is a bug, but the exit-code contract still holds
    match panic::catch_unwind(AssertUnwindSafe(|| run(&cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
        Err(_) => ExitCode::from(3),
    }
}
