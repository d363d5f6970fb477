//! Config-driven experiment runner for `poisdiff`.
//!
//! A run reads one JSON config, executes the experiment on a rayon pool and
//! writes `summary.csv`, `rate_fit.json` where a rate is fitted, an optional
//! `plot.svg`, kind-specific JSON and a `manifest.json`.

pub mod catalog;
pub mod config;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use catalog::{list_models, CatalogEntry, Model};
pub use config::{ConfigError, ExperimentConfig, Kind, ValidConfig};
pub use experiments::{ExperimentError, Outcome};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

pub const DEFAULT_OUT: &str = "poisdiff-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config {path}: {source}")]
    Config { path: String, source: ConfigError },

    #[error("experiment failed: {0}")]
    Runtime(#[from] ExperimentError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => EXIT_CONFIG,
            CliError::Runtime(_) | CliError::Io { .. } => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// What a finished run wrote.
#[derive(Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Runs a validated experiment on a pool of `workers` threads (default: all cores).
pub fn execute(cfg: &ValidConfig, workers: Option<usize>) -> Result<Outcome, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Io {
        context: "starting worker pool".into(),
        source: std::io::Error::other(e),
    })?;
    Ok(pool.install(|| experiments::run(cfg))?)
}

/// Parses, runs and writes one experiment from config source text.
pub fn run_source(src: &str, label: &str, opts: &RunOptions) -> Result<RunReport, CliError> {
    let cfg = ExperimentConfig::parse(src, opts.seed).map_err(|source| CliError::Config {
        path: label.into(),
        source,
    })?;
    let outcome = execute(&cfg, opts.workers)?;
    let out_dir = opts
        .out
        .clone()
        .or_else(|| cfg.config.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let rendered = output::render(&outcome, &cfg.config, cfg.model_id());
    let files = output::write_files(&out_dir, &rendered).map_err(|source| CliError::Io {
        context: format!("writing {}", out_dir.display()),
        source,
    })?;
    Ok(RunReport {
        outcome,
        out_dir,
        files,
    })
}

/// Like [`run_source`], reading the config from a file.
pub fn run_file(path: &Path, opts: &RunOptions) -> Result<RunReport, CliError> {
    let label = path.display().to_string();
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        path: label.clone(),
        source: ConfigError {
            line: 1,
            message: format!("cannot read config: {e}"),
        },
    })?;
    run_source(&src, &label, opts)
}
