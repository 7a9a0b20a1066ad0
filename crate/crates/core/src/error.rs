use thiserror::Error;

use crate::registry::DimensionId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the engine can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate appraisal item id `{0}`")]
    DuplicateItem(String),
    #[error("unknown appraisal dimension `{0}`")]
    UnknownDimension(String),
    #[error("registry document is missing dimension {0}")]
    MissingDimension(DimensionId),
    #[error("dimension `{0}` has an empty canonical statement")]
    EmptyCanonicalStatement(DimensionId),

    #[error("lexicon word `{word}` is listed under both {first} and {second}")]
    LexiconOverlap {
        word: String,
        first: DimensionId,
        second: DimensionId,
    },

    #[error("query text is empty")]
    EmptyQuery,

    #[error("salience scorer unavailable: {0}")]
    ScorerUnavailable(String),
    #[error("protocol error: {0}")]
    ProtocolError(String),
    #[error("invalid raw score {value} for {dimension}")]
    InvalidScore { dimension: DimensionId, value: f64 },

    #[error("candidate `{candidate}`: {reason}")]
    InvalidCandidate { candidate: String, reason: String },
    #[error("duplicate candidate id `{0}`")]
    DuplicateCandidate(String),
    #[error("appraisal vector is missing dimension {0}")]
    IncompleteVector(DimensionId),
    #[error("no candidates to rank")]
    NoCandidates,

    #[error("nothing to explain: every candidate was excluded")]
    NothingToExplain,
    #[error("invalid prompt request: {0}")]
    InvalidPromptRequest(String),
    #[error("prompt template error: {0}")]
    Template(String),
    #[error("explanation realizer unavailable: {0}")]
    RealizerUnavailable(String),
    #[error("chat completion was empty")]
    EmptyCompletion,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
