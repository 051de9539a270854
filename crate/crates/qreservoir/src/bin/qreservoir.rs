//! Command-line front end: run experiments from config files, validate
//! configs, and exercise runtime invariant suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qreservoir::config::ExperimentConfig;
use qreservoir::error::QrError;
use qreservoir::runner::{run_experiment, run_invariants};

#[derive(Parser)]
#[command(name = "qreservoir", about = "Quantum reservoir computing experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        /// Path to a `section.key = value` config file.
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Override the base seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for CSVs (default: current directory).
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Parse and validate a config file without running it.
    Validate { config: PathBuf },
    /// Check physical and numerical invariants, printing PASS/FAIL lines.
    Invariants {
        /// One of: spin, gaussian, readout, all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, QrError> {
    match cli.command {
        Command::Run { config, jobs, seed, out } => {
            let mut experiment = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                experiment.seed = seed;
            }
            if let Some(jobs) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build_global()
                    .map_err(|e| QrError::Domain(format!("cannot size worker pool: {e}")))?;
            }
            let summary = run_experiment(&experiment, &out)?;
            for note in &summary.notes {
                println!("{note}");
            }
            for file in &summary.files {
                println!("wrote {}", out.join(file).display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config } => {
            ExperimentConfig::load(&config)?;
            println!("config ok");
            Ok(ExitCode::SUCCESS)
        }
        Command::Invariants { suite } => {
            if !matches!(suite.as_str(), "spin" | "gaussian" | "readout" | "all") {
                return Err(QrError::Domain(format!(
                    "unknown suite `{suite}` (expected spin, gaussian, readout, or all)"
                )));
            }
            if run_invariants(&suite)? {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
    }
}
