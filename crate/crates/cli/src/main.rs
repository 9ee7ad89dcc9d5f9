use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use layerwise_cli::{
    apply_overrides, parse_config, run_experiment, CliError, ExperimentOutcome, Overrides,
};

/// Exit codes: 0 = clean run, 1 = configuration or IO error, 2 = experiment
/// completed but at least one run diverged.
#[derive(Parser)]
#[command(
    name = "layerwise",
    version,
    about = "Compare full and sequential (layer-wise) training of small feedforward networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        /// Experiment config; an empty file runs the builtin defaults.
        config: PathBuf,
        /// Output directory (overrides `run.out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seeded runs per strategy (overrides `run.seeds`).
        #[arg(long)]
        seeds: Option<usize>,
        /// Comma-separated strategies to run (overrides `run.strategies`).
        #[arg(long)]
        strategies: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests arrive here too; only genuine usage
            // errors are failures.
            let failed = err.use_stderr();
            let _ = err.print();
            return if failed { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Run {
        config,
        out,
        seeds,
        strategies,
    } = cli.command;
    match execute(&config, Overrides { out, seeds, strategies }) {
        Ok(outcome) => {
            println!(
                "completed {} runs in {:.2}s; outputs in {}",
                outcome.entries.len(),
                outcome.elapsed_seconds,
                outcome.out_dir.display()
            );
            if outcome.is_clean() {
                ExitCode::SUCCESS
            } else {
                println!(
                    "{} of {} runs diverged; details in {}",
                    outcome.divergence_count(),
                    outcome.entries.len(),
                    outcome.summary_path().display()
                );
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn execute(config_path: &PathBuf, overrides: Overrides) -> Result<ExperimentOutcome, CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::io(format!("reading {}", config_path.display()), e))?;
    let mut cfg = parse_config(&text)?;
    apply_overrides(&mut cfg, &overrides)?;
    run_experiment(&cfg)
}
