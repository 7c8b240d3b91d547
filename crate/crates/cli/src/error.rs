use std::fmt;

use mocap_core::Error;

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config keys or profile names.
    Usage(String),
    Core(Error),
}

pub type Outcome<T> = std::result::Result<T, Failure>;

impl Failure {
    /// 1 for usage errors, 3 for numerical failures, 2 for everything else
    /// (unreadable or inconsistent data, I/O).
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Core(Error::Config(_)) => 1,
            Failure::Core(Error::Numerical(_) | Error::NonFiniteGradient { .. }) => 3,
            Failure::Core(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}
