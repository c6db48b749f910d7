mod config;
mod error;
mod observables;
mod presets;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Scenario;
use error::CliError;

/// Environment variable holding the default worker count.
const WORKERS_ENV: &str = "KERR_MZI_WORKERS";

#[derive(Parser)]
#[command(name = "kerr-mzi", version, about = "Kerr-nonlinear Mach-Zehnder interferometer simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write `<name>.csv` and `<name>.json`.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads (defaults to $KERR_MZI_WORKERS, then all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Parse a scenario and report the resources it needs.
    Validate { config: PathBuf },
    /// Print a built-in scenario as TOML.
    Preset { name: String },
    /// List the built-in scenarios.
    ListPresets,
}

fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::parse("config", format!("cannot read {}: {e}", path.display())))?;
    Scenario::from_toml(&text)
}

fn workers(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(n) = flag {
        return if n == 0 { Err(CliError::domain("--workers", "must be at least 1")) } else { Ok(Some(n)) };
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::parse(WORKERS_ENV, format!("expected a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

#[cfg(feature = "parallel")]
fn init_pool(n: Option<usize>) {
    if let Some(n) = n {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn init_pool(_: Option<usize>) {}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out, workers: w } => {
            let scenario = load(&config)?;
            init_pool(workers(w)?);
            let (csv, json) = run::run(&scenario, &out)?;
            println!("{}", csv.display());
            println!("{}", json.display());
        }
        Command::Validate { config } => {
            let scenario = load(&config)?;
            print!("{}", run::validate_report(&scenario)?);
        }
        Command::Preset { name } => {
            let p = presets::find(&name).ok_or_else(|| {
                let names: Vec<&str> = presets::PRESETS.iter().map(|p| p.name).collect();
                CliError::parse("preset", format!("unknown preset {name:?}; available: {}", names.join(", ")))
            })?;
            print!("{}", p.toml);
        }
        Command::ListPresets => {
            for p in presets::PRESETS {
                println!("{:<6}  {}", p.name, p.summary);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
