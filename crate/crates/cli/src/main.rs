use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use oscillab::config::Experiment;
use oscillab::{parse_config, parse_config_with, run};

#[derive(Parser)]
#[command(name = "oscillab", version, about = "Hermite-spectral NLS experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Directory for results.csv and manifest.json; overrides `output_dir`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Seed; overrides the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; falls back to OSCILLAB_THREADS.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse a config and print the resolved parameters.
    Validate { config: PathBuf },
    /// List the available experiments.
    ListExperiments,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn threads(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("OSCILLAB_THREADS") {
        Ok(v) => v.trim().parse().map(Some).with_context(|| format!("OSCILLAB_THREADS=`{v}` is not a count")),
        Err(_) => Ok(None),
    }
}

fn main_inner(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run { config, output_dir, seed, threads: t } => {
            if let Some(n) = threads(t)? {
                rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
            }
            let text = read(&config)?;
            let cfg = parse_config_with(&text, seed).with_context(|| format!("in {}", config.display()))?;
            let dir = output_dir
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from(format!("{}-seed{}", cfg.experiment, cfg.seed)));
            let report = run(&cfg, &text, &dir)?;
            eprintln!(
                "{}: {} rows written to {}{}",
                cfg.experiment,
                report.rows,
                dir.display(),
                if report.tainted { " (tainted)" } else { "" }
            );
            Ok(report.exit_code() as u8)
        }
        Command::Validate { config } => {
            let cfg = parse_config(&read(&config)?).with_context(|| format!("in {}", config.display()))?;
            println!("{}", serde_json::to_string_pretty(&cfg.resolved)?);
            Ok(0)
        }
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<20} {}", e.name(), e.summary());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
