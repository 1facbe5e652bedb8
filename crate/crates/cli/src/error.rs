use std::path::PathBuf;

use waveguide_core::analysis::AnalysisError;
use waveguide_core::curve::CurveError;
use waveguide_core::eigen::EigenError;
use waveguide_core::waveguide::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::VerificationFailed(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        match e {
            EigenError::NotConverged { .. } | EigenError::BreakdownRestart => CliError::NotConverged(e.to_string()),
            EigenError::InvalidRequest(_) | EigenError::TooLarge { .. } => CliError::Validation(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Model(m) => m.into(),
            AnalysisError::Eigen(m) => m.into(),
            AnalysisError::GroundStateSignFailure { .. } => CliError::VerificationFailed(e.to_string()),
            AnalysisError::InvalidPolicy(_) | AnalysisError::InsufficientData { .. } => {
                CliError::Validation(e.to_string())
            }
        }
    }
}
