use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hbac_cli::commands::{cmd_compare, cmd_limit, cmd_simulate, cmd_sweep, CommandError, RunOutcome};
use hbac_cli::config::{parse_config, RunConfig};
use hbac_cli::presets::{preset_body, preset_names};

/// Heat-bath algorithmic cooling on small spin registers.
#[derive(Parser)]
#[command(name = "hbac", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one cooling protocol and write its trajectory as CSV
    Simulate(RunArgs),
    /// Run the fixed circuit and both PPA variants side by side
    Compare(RunArgs),
    /// Scan reset polarizations, rotation angles, or noise over a grid
    Sweep(RunArgs),
    /// Print the cooling limit for n computation qubits
    Limit {
        /// Number of computation qubits
        n: usize,
        /// Reset polarizations, one per reset spin
        #[arg(required = true)]
        polarizations: Vec<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Path to a run-config file
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a bundled preset
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output CSV path (a .manifest file is written next to it)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override the iteration cap
    #[arg(long, value_name = "N")]
    iterations: Option<usize>,
    /// Override the convergence tolerance
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
}

fn load_config(args: &RunArgs) -> Result<RunConfig, CommandError> {
    let body = match (&args.config, &args.preset) {
        (Some(path), None) => std::fs::read_to_string(path).map_err(|e| {
            CommandError::Config(format!("cannot read {}: {e}", path.display()))
        })?,
        (None, Some(name)) => preset_body(name)
            .ok_or_else(|| {
                CommandError::Config(format!(
                    "unknown preset `{name}` (available: {})",
                    preset_names().join(", ")
                ))
            })?
            .to_string(),
        _ => {
            return Err(CommandError::Config(
                "pass exactly one of --config <path> or --preset <name>".into(),
            ))
        }
    };
    let mut config = parse_config(&body)?;
    if let Some(iterations) = args.iterations {
        if iterations == 0 {
            return Err(CommandError::Config("--iterations must be at least 1".into()));
        }
        config.iterations = iterations;
    }
    if let Some(tol) = args.tol {
        if !tol.is_finite() || tol < 0.0 {
            return Err(CommandError::Config("--tol must be a nonnegative number".into()));
        }
        config.tol = tol;
    }
    Ok(config)
}

fn out_path(args: &RunArgs, config: &RunConfig, default_name: &str) -> PathBuf {
    args.out
        .clone()
        .or_else(|| config.output_path.clone())
        .unwrap_or_else(|| PathBuf::from(default_name))
}

fn report(outcome: RunOutcome) -> ExitCode {
    println!(
        "wrote {} data rows to {} (manifest: {})",
        outcome.data_rows,
        outcome.csv_path.display(),
        outcome.manifest_path.display()
    );
    println!("{}", outcome.summary);
    ExitCode::SUCCESS
}

fn fail(error: CommandError) -> ExitCode {
    eprintln!("{error}");
    ExitCode::from(error.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(args) => match load_config(&args) {
            Ok(config) => {
                let out = out_path(&args, &config, "hbac-simulate.csv");
                match cmd_simulate(&config, &out) {
                    Ok(outcome) => report(outcome),
                    Err(error) => fail(error),
                }
            }
            Err(error) => fail(error),
        },
        Command::Compare(args) => match load_config(&args) {
            Ok(config) => {
                let out = out_path(&args, &config, "hbac-compare.csv");
                match cmd_compare(&config, &out) {
                    Ok(outcome) => report(outcome),
                    Err(error) => fail(error),
                }
            }
            Err(error) => fail(error),
        },
        Command::Sweep(args) => match load_config(&args) {
            Ok(config) => {
                let out = out_path(&args, &config, "hbac-sweep.csv");
                match cmd_sweep(&config, &out) {
                    Ok(outcome) => report(outcome),
                    Err(error) => fail(error),
                }
            }
            Err(error) => fail(error),
        },
        Command::Limit { n, polarizations } => match cmd_limit(n, &polarizations) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(error) => fail(error),
        },
    }
}
