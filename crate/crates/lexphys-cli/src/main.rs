use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use lexphys_cli::{load_config, run_experiment, validate_config};

#[derive(Parser)]
#[command(name = "lexphys", about = "Batch experiment runner for lexphys-core")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a config and run its experiment
    Run {
        /// JSON config file
        config: PathBuf,
        /// override the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// override the config output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a config without running anything
    Validate {
        /// JSON config file
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, seed, out } => run(&config, seed, out.as_deref()),
        Command::Validate { config } => validate(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(config: &std::path::Path, seed: Option<u64>, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    let cfg = load_config(config)?;
    let started = Instant::now();
    let report = run_experiment(&cfg, seed, out)?;
    let elapsed = started.elapsed();
    println!("{} done in {:.3}s (seed {})", report.kind, elapsed.as_secs_f64(), report.seed);
    for name in &report.artifacts {
        println!("  {}", report.out_dir.join(name).display());
    }
    println!("  {}", report.out_dir.join("report.json").display());
    Ok(())
}

fn validate(config: &std::path::Path) -> anyhow::Result<()> {
    let cfg = load_config(config)?;
    validate_config(&cfg)?;
    println!("config ok: {}", cfg.experiment.kind());
    Ok(())
}
