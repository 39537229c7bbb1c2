mod config;
mod run;
mod verify;

use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde_json::json;

use config::{Command, RunConfig, CONFIG_VERSION};
use resonance_core::lfunc::DEFAULT_CUSP_COEFFICIENTS;
use run::{cache_dir, run, CliError};

/// Resonance-method experiments on L-functions.
#[derive(Debug, Parser)]
#[command(name = "resonance", version)]
struct Cli {
    /// L-function to include; repeat for several (default: zeta).
    #[arg(long = "spec", global = true)]
    specs: Vec<String>,
    /// Coefficients precomputed for cusp forms.
    #[arg(long, global = true)]
    cusp_coefficients: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Write tabular results as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Directory for cached coefficient series.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Load the whole run from a JSON config (no subcommand allowed).
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(vec![format!("{}: {e}", path.display())]))
}

fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let mut config = match (cli.config, cli.command) {
        (Some(path), None) => load_config(&path)?,
        (None, Some(command)) => RunConfig {
            format_version: CONFIG_VERSION,
            specs: vec!["zeta".into()],
            cusp_coefficients: DEFAULT_CUSP_COEFFICIENTS,
            output: None,
            csv: None,
            cache_dir: None,
            command,
        },
        (Some(_), Some(_)) => {
            return Err(CliError::Config(vec!["--config cannot be combined with a subcommand".into()]))
        }
        (None, None) => return Err(CliError::Config(vec!["a subcommand or --config is required".into()])),
    };
    if !cli.specs.is_empty() {
        config.specs = cli.specs;
    }
    if let Some(n) = cli.cusp_coefficients {
        config.cusp_coefficients = n;
    }
    config.output = cli.output.or(config.output);
    config.csv = cli.csv.or(config.csv);
    config.cache_dir = cli.cache_dir.or(config.cache_dir);
    config.cache_dir = cache_dir(&config);
    Ok(config)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let config = resolve(cli)?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let outcome = run(&config)?;
    let report = json!({
        "format_version": CONFIG_VERSION,
        "command": config.command.name(),
        "config": config,
        "result": outcome.result,
        "timestamps": {
            "started_unix": started,
            "elapsed_seconds": clock.elapsed().as_secs_f64(),
        },
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    match &config.output {
        Some(path) => write_text(path, &text)?,
        None => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = writeln!(out, "{text}") {
                if e.kind() != ErrorKind::BrokenPipe {
                    return Err(CliError::Io(e.to_string()));
                }
            }
        }
    }
    if let (Some(path), Some(csv)) = (&config.csv, &outcome.csv) {
        write_text(path, csv)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim().to_string());
            eprintln!("{}", serde_json::to_string_pretty(&err.to_json()).unwrap_or_else(|_| err.to_string()));
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string_pretty(&e.to_json()).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
