use std::fmt;
use std::process::ExitCode;

use retroatom::Error;

/// Failure classes, each mapped to a distinct process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed flags, presets, JSON or parameters.
    Config(String),
    /// The measurement outcome has zero probability for the given channel or ensemble.
    Impossible(String),
    /// An internal cross-check or the check suite failed, or output could not be written.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Impossible(_) => ExitCode::from(3),
            CliError::Failure(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid input: {m}"),
            CliError::Impossible(m) => f.write_str(m),
            CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ImpossibleOutcome(_) | Error::IncompatibleEnsemble => CliError::Impossible(e.to_string()),
            Error::NonUnitary(_) | Error::ZeroSteps => CliError::Failure(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
