mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(macc_core::Error),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use macc_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::BudgetExceeded { .. }) => 3,
            CliError::Core(
                E::Parse(_)
                | E::InvalidConfig(_)
                | E::MemoryRegime { .. }
                | E::Sizing(_)
                | E::IndexOutOfRange { .. }
                | E::InvalidPrivateSet { .. }
                | E::ConditionC1 { .. },
            ) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<macc_core::Error> for CliError {
    fn from(e: macc_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(run) => commands::verify(run),
        Command::Tradeoff(run) => commands::tradeoff(run),
        Command::PrivateSet(run) => commands::private_set(run),
        Command::Attack { run, target, attacker } => commands::attack(run, *target, *attacker),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("macc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
