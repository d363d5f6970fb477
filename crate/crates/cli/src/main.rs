use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use poisdiff_cli::{list_models, run_file, RunOptions};

#[derive(Debug, Parser)]
#[command(
    name = "poisdiff",
    version,
    about = "Run diffusion-approximation experiments from JSON configs"
)]
struct Cli {
    /// Worker threads for replications (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// Print the model catalog with parameter schemas as JSON.
    ListModels,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListModels => {
            println!(
                "{}",
                serde_json::to_string_pretty(&list_models()).expect("catalog serializes")
            );
            ExitCode::SUCCESS
        }
        Command::Run { config } => {
            let opts = RunOptions {
                workers: cli.workers,
                seed: cli.seed,
                out: cli.out,
            };
            match run_file(&config, &opts) {
                Ok(report) => {
                    for f in &report.files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("poisdiff: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
