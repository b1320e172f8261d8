use thiserror::Error;

/// Failures of a scenario run, each mapped to its own exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("incompatible query: {0}")]
    IncompatibleQuery(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Parse(_) => 2,
            Self::UnsupportedModel(_) => 3,
            Self::IncompatibleQuery(_) => 4,
            Self::Numeric(_) => 5,
        }
    }
}

impl From<repfam::Error> for CliError {
    fn from(e: repfam::Error) -> Self {
        use repfam::Error as E;
        match e {
            E::InvalidInput(s) => Self::Parse(s),
            E::UnsupportedModel(s) => Self::UnsupportedModel(s),
            E::IncompatibleModel(s) => Self::IncompatibleQuery(s),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
