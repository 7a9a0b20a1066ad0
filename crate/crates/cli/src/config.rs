//! Run configuration: config file, then flags, then environment for
//! remote endpoints.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use schemars::JsonSchema;
use serde::Deserialize;

use appraisal_core::explanation::{ChatEndpoint, PromptTemplates, DEFAULT_CHAT_MODEL};
use appraisal_core::salience::{DEFAULT_NLI_MODEL, DEFAULT_TOP_K};
use appraisal_core::{
    load_registry, Candidate, EntailmentEndpoint, Engine, LexicalScorer, LexicalWeights, Lexicons,
    Query, ScoringConstants, Selection, UserProfile,
};

use crate::args::{GlobalOpts, OutputFormat, RealizerKind, ScorerKind};
use crate::error::{CliError, CliResult};
use crate::fixtures::{fixture_names, load_fixture};

pub const ENV_NLI_URL: &str = "APPRAISAL_NLI_URL";
pub const ENV_LLM_URL: &str = "APPRAISAL_LLM_URL";
pub const ENV_LLM_MODEL: &str = "APPRAISAL_LLM_MODEL";
pub const ENV_LLM_KEY: &str = "APPRAISAL_LLM_KEY";

/// On-disk TOML configuration. Relative paths resolve against the config
/// file's directory.
#[derive(Debug, Default, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub registry: Option<PathBuf>,
    pub lexicons: Option<PathBuf>,
    pub prompts: Option<PathBuf>,
    pub profile: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
    pub query: Option<String>,
    pub scorer: Option<ScorerKind>,
    pub realizer: Option<RealizerKind>,
    pub top_k: Option<usize>,
    pub threshold: Option<f64>,
    pub fallback: Option<bool>,
    pub normative_filter: Option<bool>,
    pub format: Option<OutputFormat>,
    pub scoring: ScoringConstants,
    pub salience: LexicalWeights,
    pub remote: RemoteConfig,
}

#[derive(Debug, Default, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct RemoteConfig {
    pub nli_url: Option<String>,
    pub nli_model: Option<String>,
    pub llm_url: Option<String>,
    pub llm_model: Option<String>,
    pub timeout_secs: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub registry: Option<PathBuf>,
    pub lexicons: Option<PathBuf>,
    pub prompts: Option<PathBuf>,
    pub profile: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
    pub query: Option<String>,
    pub fixture: Option<String>,
    pub scorer: ScorerKind,
    pub realizer: RealizerKind,
    pub selection: Selection,
    pub fallback: bool,
    pub filter_normative: bool,
    pub baseline: bool,
    pub compare: bool,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub scoring: ScoringConstants,
    pub salience_weights: LexicalWeights,
    /// Empty URL when unconfigured; calls then report the service as
    /// unavailable.
    pub nli: EntailmentEndpoint,
    pub llm: ChatEndpoint,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::resolve(&GlobalOpts::default(), &|_| None).expect("defaults are valid")
    }
}

/// Profile, query and candidates for one run.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub profile: UserProfile,
    pub query: Query,
    pub candidates: Vec<Candidate>,
}

fn read(path: &Path, what: &str) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {what} `{}`: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    serde_json::from_str(&read(path, what)?)
        .map_err(|e| CliError::Input(format!("invalid {what} `{}`: {e}", path.display())))
}

fn require_exists(path: &Option<PathBuf>, what: &str) -> CliResult<()> {
    match path {
        Some(p) if !p.exists() => Err(CliError::Input(format!(
            "{what} `{}` does not exist",
            p.display()
        ))),
        _ => Ok(()),
    }
}

impl RunConfig {
    /// Merges the config file named by `opts.config` (if any), the flags
    /// and environment variables read through `env`.
    pub fn resolve(opts: &GlobalOpts, env: &dyn Fn(&str) -> Option<String>) -> CliResult<RunConfig> {
        let (file, base) = match &opts.config {
            Some(path) => {
                let text = read(path, "config")?;
                let file: ConfigFile = toml::from_str(&text)
                    .map_err(|e| CliError::Input(format!("invalid config `{}`: {e}", path.display())))?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (file, base)
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };
        let rel = |p: Option<PathBuf>| p.map(|p| if p.is_absolute() { p } else { base.join(p) });

        let top_k = opts.top_k.or(file.top_k).unwrap_or(DEFAULT_TOP_K);
        if !(1..=6).contains(&top_k) {
            return Err(CliError::Input(format!("--top-k must be in 1..=6, got {top_k}")));
        }
        let selection = match opts.threshold.or(file.threshold) {
            Some(t) if (0.0..=1.0).contains(&t) => Selection::Threshold(t),
            Some(t) => {
                return Err(CliError::Input(format!("--threshold must be in [0,1], got {t}")))
            }
            None => Selection::TopK(top_k),
        };
        file.scoring.validate().map_err(CliError::Input)?;
        let w = &file.salience;
        for v in [
            w.query_hit,
            w.profile_hit,
            w.time_constraint_bonus,
            w.sentiment_bonus,
            w.goals_bonus,
            w.constraints_bonus,
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Input(format!(
                    "salience weights must be finite and non-negative, got {v}"
                )));
            }
        }

        let timeout = Duration::from_secs(file.remote.timeout_secs.unwrap_or(10));
        let mut nli = EntailmentEndpoint::new(
            env(ENV_NLI_URL).or(file.remote.nli_url).unwrap_or_default(),
        );
        nli.model = file.remote.nli_model.unwrap_or_else(|| DEFAULT_NLI_MODEL.into());
        nli.timeout = timeout;
        let mut llm = ChatEndpoint::new(env(ENV_LLM_URL).or(file.remote.llm_url).unwrap_or_default());
        llm.model = env(ENV_LLM_MODEL)
            .or(file.remote.llm_model)
            .unwrap_or_else(|| DEFAULT_CHAT_MODEL.into());
        llm.api_key = env(ENV_LLM_KEY);
        llm.timeout = timeout;

        let config = RunConfig {
            registry: opts.registry.clone().or(rel(file.registry)),
            lexicons: opts.lexicons.clone().or(rel(file.lexicons)),
            prompts: opts.prompts.clone().or(rel(file.prompts)),
            profile: opts.profile.clone().or(rel(file.profile)),
            candidates: opts.candidates.clone().or(rel(file.candidates)),
            query: opts.query.clone().or(file.query),
            fixture: opts.fixture.clone(),
            scorer: opts.scorer.or(file.scorer).unwrap_or(ScorerKind::Lexical),
            realizer: opts.realizer.or(file.realizer).unwrap_or(RealizerKind::Template),
            selection,
            fallback: opts.fallback || file.fallback.unwrap_or(false),
            filter_normative: !opts.no_normative_filter && file.normative_filter.unwrap_or(true),
            baseline: opts.baseline,
            compare: opts.compare,
            out: opts.out.clone(),
            format: opts.format.or(file.format).unwrap_or(OutputFormat::Text),
            scoring: file.scoring,
            salience_weights: file.salience,
            nli,
            llm,
        };
        for (path, what) in [
            (&config.registry, "registry"),
            (&config.lexicons, "lexicons"),
            (&config.prompts, "prompt templates"),
            (&config.profile, "profile"),
            (&config.candidates, "candidates"),
        ] {
            require_exists(path, what)?;
        }
        Ok(config)
    }

    pub fn engine(&self) -> CliResult<Engine> {
        let registry = match &self.registry {
            Some(p) => load_registry(Some(&read(p, "registry")?))?,
            None => load_registry(None)?,
        };
        let lexicons = match &self.lexicons {
            Some(p) => Lexicons::load(Some(&read(p, "lexicons")?))?,
            None => Lexicons::bundled(),
        };
        let templates = match &self.prompts {
            Some(p) => PromptTemplates::parse(&read(p, "prompt templates")?)?,
            None => PromptTemplates::bundled(),
        };
        Ok(Engine {
            registry,
            lexicons,
            constants: self.scoring.clone(),
            lexical: LexicalScorer::new(self.salience_weights.clone()),
            templates,
        })
    }

    /// Loads inputs from `--fixture` or from the profile/query/candidates
    /// settings. Candidates are only required when `need_candidates`.
    pub fn inputs(&self, need_candidates: bool) -> CliResult<Inputs> {
        if let Some(name) = &self.fixture {
            let f = load_fixture(name).ok_or_else(|| {
                CliError::Input(format!(
                    "unknown fixture `{name}`; available: {}",
                    fixture_names().join(", ")
                ))
            })?;
            return Ok(Inputs {
                profile: f.profile,
                query: self.query.clone().map(Query::new).unwrap_or(f.query),
                candidates: f.candidates,
            });
        }
        let profile_path = self
            .profile
            .as_ref()
            .ok_or_else(|| CliError::Input("missing --profile (or --fixture)".into()))?;
        let profile: UserProfile = parse_json(profile_path, "profile")?;
        let query = self
            .query
            .clone()
            .ok_or_else(|| CliError::Input("missing --query".into()))?;
        let candidates = match (&self.candidates, need_candidates) {
            (Some(p), _) => parse_json(p, "candidates")?,
            (None, true) => return Err(CliError::Input("missing --candidates".into())),
            (None, false) => Vec::new(),
        };
        Ok(Inputs {
            profile,
            query: Query::new(query),
            candidates,
        })
    }
}
