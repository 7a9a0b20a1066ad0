use thiserror::Error;

use appraisal_core::Error as CoreError;

pub const EXIT_PIPELINE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    /// Missing or unreadable files, malformed documents, bad flags.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Pipeline(CoreError),
    #[error("scenario `{name}` failed: {detail}")]
    ScenarioFailed { name: String, detail: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Pipeline(_) | CliError::ScenarioFailed { .. } => EXIT_PIPELINE,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DuplicateItem(_)
            | CoreError::UnknownDimension(_)
            | CoreError::MissingDimension(_)
            | CoreError::EmptyCanonicalStatement(_)
            | CoreError::LexiconOverlap { .. }
            | CoreError::EmptyQuery
            | CoreError::InvalidCandidate { .. }
            | CoreError::DuplicateCandidate(_)
            | CoreError::Template(_)
            | CoreError::Json(_)
            | CoreError::Io(_) => CliError::Input(e.to_string()),
            other => CliError::Pipeline(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
