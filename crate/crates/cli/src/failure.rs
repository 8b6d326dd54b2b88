use std::fmt;
use std::path::Path;

use pilotwave::Error;

/// Everything that ends a run early, by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration or violated precondition (exit 2).
    Config(String),
    /// Blow-up or non-convergence (exit 3).
    Numerical(String),
    /// `verify` found a failing inequality (exit 4).
    Assumption,
    /// Reading or writing a file (exit 5).
    Io(String),
}

impl Failure {
    pub fn key(key: &str, reason: impl fmt::Display) -> Self {
        Failure::Config(format!("invalid value for `{key}`: {reason}"))
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Failure::Io(format!("{}: {err}", path.display()))
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Assumption => 4,
            Failure::Io(_) => 5,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Io(m) => f.write_str(m),
            Failure::Assumption => f.write_str("assumption check failed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            return Failure::Numerical(e.to_string());
        }
        match e {
            Error::Io(_) | Error::Parse(_) => Failure::Io(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}
