use choremarket::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    Model(#[from] ModelError),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("oracle mismatch: solver found {solver} profiles, oracle {oracle}")]
    OracleMismatch { solver: usize, oracle: usize },
    #[error("certificate failure: {0}")]
    Certificate(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. }
            | CliError::Write { .. }
            | CliError::Parse(_)
            | CliError::Model(_)
            | CliError::Usage(_) => 1,
            CliError::CapExceeded(_) => 2,
            CliError::OracleMismatch { .. } => 3,
            CliError::Certificate(_) => 4,
        }
    }
}
