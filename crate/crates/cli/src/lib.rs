//! Command implementations behind the `ngram-infocap` binary.
//!
//! Each command loads a price CSV, quantizes its returns and produces a
//! [`report::Report`]: a JSON document that embeds the resolved
//! [`RunConfig`], plus a flat table for `--format csv`.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use chrono::NaiveDate;

pub use config::{Cli, Command, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cannot read `{}`: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write `{}`: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("in `{}`: {source}", path.display())]
    Input { path: PathBuf, source: ngram_infocap::Error },
    #[error("window {from}:{to} holds {len} observations, at least {needed} are needed")]
    EmptyWindow { from: NaiveDate, to: NaiveDate, len: usize, needed: usize },
    #[error(transparent)]
    Core(#[from] ngram_infocap::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("cannot write output: {0}")]
    Output(std::io::Error),
}

impl CliError {
    /// 3 for broken internal invariants, 2 for everything caused by input or configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) | CliError::Input { source: e, .. } if e.is_internal() => 3,
            CliError::Json(_) => 3,
            _ => 2,
        }
    }
}

/// Run a parsed command line, writing the report to `--out` or standard output.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let (report, config) = match cli.command {
        Command::Capacity(args) => commands::capacity(&args)?,
        Command::Divergent(args) => commands::divergent(&args)?,
        Command::Stability(args) => commands::stability(&args)?,
        Command::Staircase(args) => commands::staircase(&args)?,
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    report.emit(config.format, config.out.as_deref())
}
