mod args;
mod commands;
mod input;

use std::process::ExitCode;

use clap::Parser;
use gradflow::Error;

use args::{Cli, Command};

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 2,
        Error::Format(_) | Error::Parse { .. } | Error::Size(_) | Error::Data(_) => 3,
        Error::Parameter(_) | Error::Usage(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let result = match &cli.command {
        Command::Cluster(a) => commands::cluster(a),
        Command::Kmeans(a) => commands::kmeans_cmd(a),
        Command::Synth(a) => commands::synth(a),
        Command::Eval(a) => commands::eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gradflow: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
