use std::process::ExitCode;

use clap::Parser;
use ngram_infocap_cli::config::thread_cap;
use ngram_infocap_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = thread_cap()
        .and_then(|cap| match cap {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}"))),
            None => Ok(()),
        })
        .and_then(|_| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
