use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orthosim_cli::{run, verify, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "orthosim", version, about = "Run orthogonalizer and qubit-generator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write artifacts here instead of the config's `output_dir`.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Override `sampling.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the experiment described by a config file.
    Run { config: PathBuf },
    /// Check a config file without running it.
    Validate { config: PathBuf },
    /// Run the built-in invariant battery.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => {
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if let Some(seed) = cli.seed {
                cfg.sampling.seed = seed;
            }
            let dir = cli.output_dir.unwrap_or_else(|| cfg.output_dir.clone());
            match run(&cfg, &dir) {
                Ok(outcome) => {
                    for line in &outcome.summary {
                        println!("{line}");
                    }
                    println!("wrote {} files to {}", outcome.manifest.files.len(), dir.display());
                    if outcome.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::Validate { config } => match ExperimentConfig::load(&config) {
            Ok(cfg) => {
                let v = cfg.violations();
                if v.is_empty() {
                    println!("OK");
                    ExitCode::SUCCESS
                } else {
                    for x in &v {
                        println!("{x}");
                    }
                    println!("{} violation(s)", v.len());
                    ExitCode::FAILURE
                }
            }
            Err(e) => fail(&e),
        },
        Command::Verify => {
            let report = verify::battery(cli.seed.unwrap_or(0));
            for line in report.table_lines() {
                println!("{line}");
            }
            if let Some(dir) = cli.output_dir {
                let mut cfg = ExperimentConfig::new(Experiment::Verify);
                cfg.sampling.seed = cli.seed.unwrap_or(0);
                if let Err(e) = run(&cfg, &dir) {
                    return fail(&e);
                }
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn fail(e: &orthosim_cli::CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::FAILURE
}
