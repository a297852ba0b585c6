use std::fmt;

use boostlab_core::Error;

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config file or input data (exit 1).
    Config(String),
    /// Contract, bound or guarantee violation during a run (exit 2).
    Violation(String),
    /// Anything else, e.g. I/O (exit 1).
    Other(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 2,
            Failure::Config(_) | Failure::Other(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "config error: {msg}"),
            Failure::Violation(msg) => write!(f, "violation: {msg}"),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Dataset(_) | Error::SizeLimit { .. } | Error::LengthMismatch { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Violation(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;
