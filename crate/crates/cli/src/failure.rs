//! Process exit codes and the error type that carries them.

use std::fmt;

use qcgeom::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Input = 2,
    Domain = 3,
    TraceAborted = 4,
    Immersion = 5,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: ExitKind,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Failure {
        Failure {
            kind: ExitKind::Input,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Failure {
        Failure {
            kind: ExitKind::Domain,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn exit_kind(e: &Error) -> ExitKind {
    match e {
        Error::Parse(_)
        | Error::Compile(_)
        | Error::Spec(_)
        | Error::UnknownCatalogName(_)
        | Error::BadParams(_)
        | Error::BadDelta(_)
        | Error::JunctionMismatch { .. }
        | Error::NonpositiveWarp { .. }
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch { .. } => ExitKind::Input,
        Error::LeftQcRegion { .. } | Error::StepTooLarge { .. } | Error::SignAlignmentFailure { .. } => {
            ExitKind::TraceAborted
        }
        Error::NonpositiveOperand { .. }
        | Error::InvalidMu(_)
        | Error::NoCap(_)
        | Error::ProfileDomainError { .. } => ExitKind::Immersion,
        _ => ExitKind::Domain,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure {
            kind: exit_kind(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::input(e.to_string())
    }
}
