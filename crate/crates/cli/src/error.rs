use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{0} invariant check(s) failed")]
    ChecksFailed(usize),
    #[error(transparent)]
    Core(#[from] dioph_lab::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

macro_rules! from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}

from_core!(
    dioph_lab::DigitsError,
    dioph_lab::SequenceError,
    dioph_lab::ExponentError,
    dioph_lab::ConstructError,
    dioph_lab::DomainError,
    dioph_lab::BoxDimError,
    dioph_lab::ParseRationalError
);
