//! `cvtele`: single teleportation runs, the verification matrix, squeezing
//! sweeps and the entanglement/EPR frontier.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::CommonArgs;

#[derive(Debug, Parser)]
#[command(name = "cvtele", version, about = "Continuous-variable teleportation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Teleport one input through one resource and report every metric
    Teleport {
        #[command(flatten)]
        common: CommonArgs,
        /// Also run the brute-force oracle and report its fidelity
        #[arg(long)]
        oracle: bool,
    },
    /// Run the invariant matrix; exits 1 if any check fails
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Truncation for the oracle cells
        #[arg(long)]
        oracle_trunc: Option<usize>,
    },
    /// Tabulate SVS figures of merit over a squeezing range
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// start:stop:step
        #[arg(long)]
        r_range: Option<String>,
    },
    /// Place sampled pure resources against the SVS frontier
    Frontier {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(cvtele_core::Error),
    /// Checks ran to completion and some failed; output is already written.
    Failed(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(cvtele_core::Error::Parse { .. }) => 2,
            CliError::Core(_) | CliError::Failed(_) => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Usage(msg) => json!({
                "module": "cli", "check": "usage", "defect": null, "tolerance": null, "message": msg,
            }),
            CliError::Core(e) => {
                let (defect, tolerance) = e.defect_and_tolerance();
                json!({
                    "module": e.module(), "check": e.check_name(),
                    "defect": defect, "tolerance": tolerance, "message": e.to_string(),
                })
            }
            CliError::Failed(msg) => json!({
                "module": "cli", "check": "verification", "defect": null, "tolerance": null, "message": msg,
            }),
        }
    }
}

impl From<cvtele_core::Error> for CliError {
    fn from(e: cvtele_core::Error) -> Self {
        CliError::Core(e)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("CVTELE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("CVTELE_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Teleport { common, oracle } => commands::teleport(&common, oracle),
        Command::Verify { common, oracle_trunc } => commands::verify(&common, oracle_trunc),
        Command::Sweep { common, r_range } => commands::sweep(&common, r_range),
        Command::Frontier { common, count } => commands::frontier(&common, count),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
