use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cvtele::{execute, validate_config, CliError, Experiment};

/// Worker-count override for the row-level thread pool.
const WORKERS_ENV: &str = "CVTELE_WORKERS";

#[derive(Parser)]
#[command(name = "cvtele", version, about = "Continuous-variable teleportation sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its CSV.
    Run { config: PathBuf },
    /// Parse and validate a config, printing the resolved settings.
    Validate { config: PathBuf },
    /// List the built-in experiment recipes.
    ListExperiments,
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<8}{}", e.name(), e.description());
            }
        }
        Command::Validate { config } => {
            let cfg = validate_config(&config)?;
            println!("experiment: {}", cfg.experiment);
            println!("r_grid: {:?}", cfg.r_grid);
            println!("nth_grid: {:?}", cfg.nth_grid);
            println!("inputs: {}", cfg.inputs.iter().map(|i| i.name()).collect::<Vec<_>>().join(", "));
            println!("families: {}", cfg.families.iter().map(|f| f.name()).collect::<Vec<_>>().join(", "));
            println!("quadrature_order: {}", cfg.quadrature_order);
            println!("output: {}", cfg.output.display());
        }
        Command::Run { config } => {
            let cfg = validate_config(&config)?;
            configure_workers()?;
            let rows = execute(&cfg)?;
            eprintln!("wrote {} rows to {}", rows.len(), cfg.output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvtele: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
