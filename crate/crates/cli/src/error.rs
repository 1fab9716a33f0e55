use std::path::PathBuf;

use teamcoord::{CensusError, ConversionError, GameError, SolverError};

/// Failures of a CLI command. Each maps to a documented exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("payoff discrepancy {0:e} exceeds tolerance")]
    Discrepancy(f64),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    TooLarge(String),
    #[error("{0}")]
    OriginMismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Discrepancy(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Invalid(_) => 4,
            CliError::TooLarge(_) => 5,
            CliError::OriginMismatch(_) => 6,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<ConversionError> for CliError {
    fn from(e: ConversionError) -> Self {
        match e {
            ConversionError::TooManyPrescriptions(..) => CliError::TooLarge(e.to_string()),
            ConversionError::OriginMismatch(_) => CliError::OriginMismatch(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::GameTooLarge(_) => CliError::TooLarge(e.to_string()),
            SolverError::InvalidIterationCount(_) => CliError::Usage(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<CensusError> for CliError {
    fn from(e: CensusError) -> Self {
        CliError::Usage(e.to_string())
    }
}
