//! `tpnt`: builds skeletons, validates stage certificates, and writes orbit
//! averages, oscillation witnesses, residue tables and the acceptance suite.
//!
//! Exit status is 0 when every asserted check passes, 1 when a check fails
//! and 2 on invalid input or resource errors. Failures and errors are
//! reported as one JSON record on stderr.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use commands::*;

#[derive(Parser, Debug)]
#[command(
    name = "tpnt",
    version,
    about = "Toeplitz constructions and orbit averages along primes"
)]
struct Cli {
    /// JSON config whose keys mirror the flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the resolved config as JSON and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a skeleton and its stage certificates.
    Construct(ConstructArgs),
    /// Recompute the stage certificates of a skeleton file.
    Validate(ValidateArgs),
    /// Orbit averages over an N/r grid as CSV.
    Average(AverageArgs),
    /// Averages at the stage scales and their gaps.
    Oscillate(OscillateArgs),
    /// Residue counts of a polynomial over a range of moduli.
    Residues(ResiduesArgs),
    /// Rotation-coding averages along primes.
    Sturmian(SturmianArgs),
    /// Run the acceptance suite.
    Acceptance(AcceptanceArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Construct(_) => "construct",
            Command::Validate(_) => "validate",
            Command::Average(_) => "average",
            Command::Oscillate(_) => "oscillate",
            Command::Residues(_) => "residues",
            Command::Sturmian(_) => "sturmian",
            Command::Acceptance(_) => "acceptance",
        }
    }
}

fn dispatch<T, F>(cli: &Cli, flags: &T, run: F) -> anyhow::Result<Status>
where
    T: serde::Serialize + serde::de::DeserializeOwned,
    F: FnOnce(&T) -> anyhow::Result<Status>,
{
    let resolved = config::resolve(flags, cli.config.as_deref())?;
    if cli.dump_config {
        println!("{}", serde_json::to_string_pretty(&resolved)?);
        return Ok(Status::Pass);
    }
    run(&resolved)
}

fn run(cli: &Cli) -> anyhow::Result<Status> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(toeplitz_pnt::Error::Config("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match &cli.command {
        Command::Construct(a) => dispatch(cli, a, construct),
        Command::Validate(a) => dispatch(cli, a, validate),
        Command::Average(a) => dispatch(cli, a, average),
        Command::Oscillate(a) => dispatch(cli, a, oscillate),
        Command::Residues(a) => dispatch(cli, a, residues),
        Command::Sturmian(a) => dispatch(cli, a, sturmian),
        Command::Acceptance(a) => dispatch(cli, a, acceptance),
    }
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    e.chain()
        .find_map(|c| c.downcast_ref::<toeplitz_pnt::Error>())
        .map(|e| e.kind())
        .or_else(|| {
            e.chain()
                .find_map(|c| c.downcast_ref::<std::io::Error>())
                .map(|_| "io")
        })
        .unwrap_or("other")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            eprintln!(
                "{}",
                json!({ "error": { "kind": "usage", "message": e.to_string().trim() } })
            );
            return ExitCode::from(2);
        }
    };
    let command = cli.command.name();
    match run(&cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail(record)) => {
            eprintln!("{}", json!({ "failure": record, "command": command }));
            ExitCode::from(1)
        }
        Err(e) => {
            let message = format!("{e:#}");
            eprintln!(
                "{}",
                json!({ "error": { "kind": error_kind(&e), "message": message, "command": command } })
            );
            ExitCode::from(2)
        }
    }
}
