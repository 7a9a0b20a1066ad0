//! Appraisal-based recommendation explanations.
//!
//! A user profile and a natural-language request are reduced to a
//! salience profile over six CoreGRID appraisal dimensions. Candidates are
//! scored per dimension, ranked by their salience-weighted composite, and
//! the winner is explained in appraisal terms, either by a deterministic
//! template or by a chat model, next to a non-appraisal baseline.
//!
//! Candidate scoring runs on rayon when the default `parallel` feature is
//! enabled; ranking order is identical either way.

pub mod context;
pub mod error;
pub mod explanation;
mod http;
pub mod lexicon;
pub mod pipeline;
pub mod registry;
pub mod salience;
pub mod scoring;
pub mod text;

pub use context::{
    build_unified_context, parse_time_constraint, tally_sentiment, HitSource, KeywordHit, Query,
    SentimentTally, UnifiedContext, UserProfile,
};
pub use error::{Error, Result};
pub use lexicon::Lexicons;
pub use pipeline::{Engine, PipelineRun};
pub use registry::{load_registry, AppraisalDimension, AppraisalItem, Coding, DimensionId, Registry};
pub use salience::{
    dominant_dimensions, lexical_salience, normalize, remote_entailment_salience, DimensionScores,
    EntailmentEndpoint, LexicalScorer, LexicalWeights, SalienceProfile, SalienceScorer, Selection,
};
pub use scoring::{
    composite_score, rank_candidates, rank_vectors, score_candidates, score_dimension,
    AppraisalVector, Candidate, RankOptions, RankedList, ScoringConstants,
};
