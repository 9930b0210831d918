use ent2vec::corpus::CorpusError;
use ent2vec::{MetricsError, ModelIoError, ProjectionError, SynthError, TrainError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn io_error(path: &std::path::Path, err: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {err}", path.display()))
}

impl From<CorpusError> for CliError {
    fn from(err: CorpusError) -> Self {
        match err {
            CorpusError::Config(_) => CliError::Config(err.to_string()),
            _ => CliError::Input(err.to_string()),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(err: TrainError) -> Self {
        match err {
            TrainError::Config(_) => CliError::Config(err.to_string()),
            TrainError::NonFinite { .. } => CliError::Numeric(err.to_string()),
            _ => CliError::Input(err.to_string()),
        }
    }
}

impl From<ModelIoError> for CliError {
    fn from(err: ModelIoError) -> Self {
        CliError::Input(format!("cannot load model ({}): {err}", err.code()))
    }
}

impl From<MetricsError> for CliError {
    fn from(err: MetricsError) -> Self {
        match err {
            MetricsError::NoLanguages | MetricsError::NoTaskYears => {
                CliError::Config(format!("metric does not fit this model: {err}"))
            }
            MetricsError::ZeroVector => CliError::Numeric(err.to_string()),
            _ => CliError::Input(err.to_string()),
        }
    }
}

impl From<ProjectionError> for CliError {
    fn from(err: ProjectionError) -> Self {
        match err {
            ProjectionError::Config(_) => CliError::Config(err.to_string()),
            ProjectionError::Diverged(_) => CliError::Numeric(err.to_string()),
            _ => CliError::Input(err.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(err: SynthError) -> Self {
        CliError::Config(err.to_string())
    }
}
