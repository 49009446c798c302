//! `rodtwin` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rodtwin_core::RodError;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "rodtwin", version, about = "Fuel-rod thermal digital twin")]
pub struct Cli {
    /// JSON config; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the training and sweep seeds.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Log progress to stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one coupled case and write its field, channel and sensor CSVs.
    Simulate,
    /// Solve every roster case and write a dataset directory.
    Generate,
    /// Train a reconstruction model on a dataset.
    Train {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Reconstruct a field from sensor readings.
    Reconstruct {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        sensors: PathBuf,
        /// Reference field; supplies the mesh and enables metrics.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Cladding hoop strain and slice stresses of a field.
    Strain {
        #[arg(long)]
        field: PathBuf,
    },
    /// Compare two field CSVs.
    Evaluate { predicted: PathBuf, truth: PathBuf },
    /// Burnup sweep: generate, train at a fixed learning rate, score test cases.
    SweepBurnup {
        #[arg(long, default_value_t = 300)]
        epochs: usize,
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
    },
}

pub const EXIT_USAGE: u8 = 2;

/// Exit status for each error kind.
pub fn exit_code(e: &RodError) -> u8 {
    match e.kind() {
        "config" | "format" => 3,
        "io" => 4,
        "domain" | "correlation_validity" | "simulation" | "non_convergence" => 5,
        "training" | "numerical" => 6,
        "undefined_metric" => 7,
        "structural" => 8,
        _ => 1,
    }
}

fn report(e: &RodError) -> ExitCode {
    let code = exit_code(e);
    let mut body = json!({
        "error": e.kind(),
        "message": e.to_string(),
        "exit_code": code,
    });
    if let RodError::Case { case_id, .. } = e {
        body["case_id"] = json!(case_id);
    }
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let body = json!({
                "error": "usage",
                "message": e.to_string().trim_end(),
                "exit_code": EXIT_USAGE,
            });
            eprintln!("{body}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
