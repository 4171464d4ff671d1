use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kdnls::experiments::{check_manifest, run_experiment, ExperimentConfig, ExperimentKind};
use kdnls::Result;

#[derive(Parser)]
#[command(name = "kdnls", version, about = "Pseudospectral KDNLS experiments on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment and write its manifest.
    Run {
        experiment: String,
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-verify the file hashes and assertions of a manifest.
    Check { manifest: PathBuf },
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Run {
            experiment,
            config,
            out,
            seed,
        } => {
            let kind: ExperimentKind = experiment.parse()?;
            let mut resolved = ExperimentConfig::load(&config)?.resolve(Some(kind))?;
            if let Some(dir) = out {
                resolved.output_dir = dir;
            }
            if let Some(seed) = seed {
                resolved.seed = seed;
            }
            let manifest = run_experiment(&resolved)?;
            for a in &manifest.assertions {
                println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
            }
            println!(
                "{} in {:.2} s, manifest in {}",
                manifest.experiment,
                manifest.wall_time_s,
                resolved.output_dir.display()
            );
            Ok(manifest.passed)
        }
        Command::Check { manifest } => {
            let report = check_manifest(&manifest)?;
            for f in &report.missing {
                println!("missing file: {f}");
            }
            for f in &report.hash_mismatches {
                println!("hash mismatch: {f}");
            }
            for a in &report.failed_assertions {
                println!("failed assertion: {a}");
            }
            if report.inconsistent_flag {
                println!("overall pass flag disagrees with the assertions");
            }
            println!("{}", if report.ok() { "manifest ok" } else { "manifest NOT ok" });
            Ok(report.ok())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
