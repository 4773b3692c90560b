//! Library behind the `nlchan` binary: argument types, command runners,
//! and report rendering, exposed so integration tests can drive commands
//! directly.

pub mod args;
pub mod commands;
pub mod reports;

use clap::Parser;

use args::{Cli, Command, CommonArgs, OutputArg};
use reports::{Envelope, Render};

/// Exit codes: 0 success, 1 configuration error, 2 invariant violation
/// detected during a run.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Invariant(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Invariant(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violation: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

fn emit<T: serde::Serialize + Render>(
    envelope: &Envelope<T>,
    common: &CommonArgs,
) -> Result<(), CliError> {
    let text = match common.output {
        OutputArg::Human => envelope.to_human(),
        OutputArg::Json => envelope.to_json(),
        OutputArg::Csv => envelope.to_csv(),
    };
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(CliError::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(args) => emit(&commands::run_simulate(args)?, &args.common),
        Command::Optimize(args) => emit(&commands::run_optimize(args)?, &args.common),
        Command::Bounds(args) => emit(&commands::run_bounds(args)?, &args.common),
        Command::Chsh(args) => emit(&commands::run_chsh(args)?, &args.common),
        Command::PovmCheck(args) => emit(&commands::run_povm_check(args)?, &args.common),
        Command::Separations(args) => emit(&commands::run_separations(args)?, &args.common),
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help/version requests are success; everything else is a
            // configuration error.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{err}");
            err.exit_code()
        }
    }
}
