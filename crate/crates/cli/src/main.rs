mod analyze;
mod args;
mod error;
mod export;
mod serve;
mod stats;
mod stream;

use std::io::IsTerminal;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use tracing_subscriber::EnvFilter;

use args::{Cli, Command};
use error::CliError;

fn init_logging() {
    let filter = EnvFilter::try_from_env("TELEPHYT_LOG").unwrap_or_else(|_| EnvFilter::new("info"));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .init();
}

fn block_on<F: std::future::Future<Output = Result<(), CliError>>>(f: F) -> Result<(), CliError> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(CliError::usage)?
        .block_on(f)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Serve(a) => block_on(serve::serve(&a)),
        Command::Simulate(a) => block_on(stream::simulate(&a)),
        Command::Replay(a) => block_on(stream::replay(&a)),
        Command::Analyze(a) => analyze::analyze(&a),
        Command::Stats(a) => stats::stats(&a),
        Command::Export(a) => export::export(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    init_logging();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
