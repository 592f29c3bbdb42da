use std::fmt;
use std::process::ExitCode;

use cavity_core::Error;

/// Why a command stopped, mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or parameter values. Exit 1.
    Usage(String),
    /// Numerical failure inside the models. Exit 2.
    Numerical(String),
    /// At least one consistency check failed. Exit 3.
    Consistency(usize),
    /// The reader closed stdout early (`| head`). Exit 0 without a message.
    ClosedPipe,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::Usage(_) => 1,
            Self::Numerical(_) => 2,
            Self::Consistency(_) => 3,
            Self::ClosedPipe => 0,
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
            Self::Consistency(n) => write!(f, "{n} consistency check(s) failed"),
            Self::ClosedPipe => write!(f, "output closed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::NoCavity
            | Error::WrongSpace(_)
            | Error::DimensionMismatch { .. } => Self::Usage(e.to_string()),
            Error::NoStationaryState(_)
            | Error::Singular { .. }
            | Error::NonFinite { .. }
            | Error::NotConverged { .. }
            | Error::TooManySteps { .. }
            | Error::InvariantViolation { .. } => Self::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Self::ClosedPipe;
        }
        Self::Usage(format!("i/o: {e}"))
    }
}
