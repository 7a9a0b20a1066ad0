use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "appraisal",
    version,
    about = "Appraisal-based recommendation ranking and explanation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print per-dimension salience weights and the dominant dimensions.
    Salience,
    /// Rank candidates by composite appraisal alignment.
    Rank,
    /// Explain the top-ranked candidate.
    Explain,
    /// Run a bundled case-study fixture end to end.
    Scenario {
        /// Fixture name (`sarah`, `alex`).
        name: String,
    },
    /// Print the JSON schemas of every input and output document.
    Schemas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    Lexical,
    Remote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum RealizerKind {
    Template,
    Llm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Registry JSON extending the bundled appraisal items.
    #[arg(long, global = true)]
    pub registry: Option<PathBuf>,
    /// Lexicon JSON overriding bundled keyword lists.
    #[arg(long, global = true)]
    pub lexicons: Option<PathBuf>,
    /// Prompt-template TOML.
    #[arg(long, global = true)]
    pub prompts: Option<PathBuf>,
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    #[arg(long, global = true)]
    pub query: Option<String>,
    /// Candidate-set JSON (array of candidates).
    #[arg(long, global = true)]
    pub candidates: Option<PathBuf>,
    /// Take profile, query and candidates from a bundled fixture.
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub scorer: Option<ScorerKind>,
    #[arg(long, global = true, value_enum)]
    pub realizer: Option<RealizerKind>,
    /// Emit the non-appraisal baseline explanation instead.
    #[arg(long, global = true)]
    pub baseline: bool,
    /// Emit appraisal and baseline explanations plus a comparison report.
    #[arg(long, global = true)]
    pub compare: bool,
    /// Number of dominant dimensions (1-6).
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    /// Select dominant dimensions by minimum weight instead of top-k.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Keep constraint-violating candidates in the ranking.
    #[arg(long, global = true)]
    pub no_normative_filter: bool,
    /// Fall back to the lexical scorer / template realizer when a remote
    /// service is unreachable.
    #[arg(long, global = true)]
    pub fallback: bool,
    /// Output directory for run artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
}
