use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of a mathematical operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violates a physical or numerical constraint.
    #[error("invalid value for `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The integrator produced a non-finite state.
    #[error("integration blew up at step {step}")]
    BlowUp { step: u64 },

    #[error("numerical method did not converge: {0}")]
    NoConvergence(String),

    #[error("ensemble member {member}: {source}")]
    EnsembleMember {
        member: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True when the failure is numerical rather than a bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::BlowUp { .. } | Error::NoConvergence(_) => true,
            Error::EnsembleMember { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                other => Error::Parse(format!("{other:?}")),
            }
        } else {
            Error::Parse(e.to_string())
        }
    }
}
