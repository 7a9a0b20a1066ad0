//! Which appraisal dimensions matter for a context, and how much.
//!
//! A [`SalienceScorer`] produces non-negative raw scores per dimension;
//! [`normalize`] turns them into L1 weights and [`dominant_dimensions`]
//! picks the top-k with ties broken by dimension order.

use std::collections::BTreeMap;
use std::time::Duration;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::context::{HitSource, UnifiedContext};
use crate::error::{Error, Result};
use crate::http::{post_json, CallError, DEFAULT_TIMEOUT};
use crate::registry::{DimensionId, Registry};

pub type DimensionScores = BTreeMap<DimensionId, f64>;

pub const DEFAULT_TOP_K: usize = 3;
pub const DEFAULT_NLI_MODEL: &str = "facebook/bart-large-mnli";
pub const LEXICAL_SCORER_ID: &str = "lexical";
pub const LEXICAL_FALLBACK_ID: &str = "lexical-fallback";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SalienceProfile {
    pub weights: DimensionScores,
    pub dominant: Vec<DimensionId>,
    pub scorer_id: String,
}

impl SalienceProfile {
    pub fn weight(&self, dim: DimensionId) -> f64 {
        self.weights.get(&dim).copied().unwrap_or(0.0)
    }

    /// Uniform weights over all six dimensions.
    pub fn uniform(k: usize) -> SalienceProfile {
        let weights: DimensionScores = DimensionId::ALL.iter().map(|d| (*d, 1.0 / 6.0)).collect();
        SalienceProfile {
            dominant: dominant_dimensions(&weights, k),
            weights,
            scorer_id: "uniform".into(),
        }
    }
}

pub trait SalienceScorer: Send + Sync {
    fn id(&self) -> String;
    fn raw_scores(&self, context: &UnifiedContext, registry: &Registry) -> Result<DimensionScores>;
}

/// Constants of the keyword-count scorer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default)]
pub struct LexicalWeights {
    pub query_hit: f64,
    pub profile_hit: f64,
    pub time_constraint_bonus: f64,
    pub sentiment_bonus: f64,
    pub goals_bonus: f64,
    pub constraints_bonus: f64,
}

impl Default for LexicalWeights {
    fn default() -> Self {
        LexicalWeights {
            query_hit: 2.0,
            profile_hit: 1.0,
            time_constraint_bonus: 2.0,
            sentiment_bonus: 1.0,
            goals_bonus: 1.0,
            constraints_bonus: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LexicalScorer {
    pub weights: LexicalWeights,
}

impl LexicalScorer {
    pub fn new(weights: LexicalWeights) -> Self {
        LexicalScorer { weights }
    }

    pub fn score(&self, context: &UnifiedContext) -> DimensionScores {
        let w = &self.weights;
        DimensionId::ALL
            .iter()
            .map(|&dim| {
                let mut raw = w.query_hit * context.hit_count(dim, HitSource::Query) as f64
                    + w.profile_hit * context.hit_count(dim, HitSource::Profile) as f64;
                raw += match dim {
                    DimensionId::Urgency if context.time_constraint_minutes.is_some() => {
                        w.time_constraint_bonus
                    }
                    DimensionId::Valence if context.sentiment.total() > 0 => w.sentiment_bonus,
                    DimensionId::GoalRelevance if !context.profile.goals.is_empty() => {
                        w.goals_bonus
                    }
                    DimensionId::NormativeSignificance
                        if !context.profile.dietary_constraints.is_empty() =>
                    {
                        w.constraints_bonus
                    }
                    _ => 0.0,
                };
                (dim, raw)
            })
            .collect()
    }
}

impl SalienceScorer for LexicalScorer {
    fn id(&self) -> String {
        LEXICAL_SCORER_ID.into()
    }

    fn raw_scores(&self, context: &UnifiedContext, _registry: &Registry) -> Result<DimensionScores> {
        Ok(self.score(context))
    }
}

/// Keyword-count salience with the default weights.
pub fn lexical_salience(context: &UnifiedContext, _registry: &Registry) -> DimensionScores {
    LexicalScorer::default().score(context)
}

/// Client for a hosted entailment (NLI) service.
#[derive(Debug, Clone)]
pub struct EntailmentEndpoint {
    pub url: String,
    pub model: String,
    pub timeout: Duration,
}

impl EntailmentEndpoint {
    pub fn new(url: impl Into<String>) -> Self {
        EntailmentEndpoint {
            url: url.into(),
            model: DEFAULT_NLI_MODEL.into(),
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct EntailmentHypothesis {
    pub dimension: DimensionId,
    pub text: String,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct EntailmentRequest {
    pub model: String,
    pub premise: String,
    pub hypotheses: Vec<EntailmentHypothesis>,
}

pub fn entailment_request(context: &UnifiedContext, registry: &Registry, model: &str) -> EntailmentRequest {
    EntailmentRequest {
        model: model.to_string(),
        premise: context.composite_text.clone(),
        hypotheses: registry
            .dimensions()
            .iter()
            .map(|d| EntailmentHypothesis {
                dimension: d.id,
                text: d.canonical_statement.clone(),
            })
            .collect(),
    }
}

/// Parses `{"scores":[{"dimension":..,"entailment":..}]}`. Scores are
/// matched to dimensions by key, never by position.
pub fn parse_entailment_response(body: &Value, expected: usize) -> Result<DimensionScores> {
    let protocol = |msg: String| Error::ProtocolError(msg);
    let scores = body
        .get("scores")
        .and_then(Value::as_array)
        .ok_or_else(|| protocol("response has no `scores` array".into()))?;
    if scores.len() != expected {
        return Err(protocol(format!(
            "expected {expected} scores, got {}",
            scores.len()
        )));
    }
    let mut out = DimensionScores::new();
    for entry in scores {
        let dim = entry
            .get("dimension")
            .and_then(Value::as_str)
            .ok_or_else(|| protocol("score entry without `dimension`".into()))?;
        let dim: DimensionId = dim
            .parse()
            .map_err(|_| protocol(format!("unknown dimension `{dim}`")))?;
        let value = entry
            .get("entailment")
            .and_then(Value::as_f64)
            .ok_or_else(|| protocol(format!("{dim}: missing numeric `entailment`")))?;
        if !(0.0..=1.0).contains(&value) {
            return Err(protocol(format!("{dim}: entailment {value} outside [0,1]")));
        }
        if out.insert(dim, value).is_some() {
            return Err(protocol(format!("{dim} scored twice")));
        }
    }
    Ok(out)
}

impl SalienceScorer for EntailmentEndpoint {
    fn id(&self) -> String {
        format!("remote:{}", self.model)
    }

    fn raw_scores(&self, context: &UnifiedContext, registry: &Registry) -> Result<DimensionScores> {
        remote_entailment_salience(context, registry, self)
    }
}

/// One POST to the entailment service; premise is the composite context
/// text, hypotheses are the dimensions' canonical statements.
pub fn remote_entailment_salience(
    context: &UnifiedContext,
    registry: &Registry,
    endpoint: &EntailmentEndpoint,
) -> Result<DimensionScores> {
    if endpoint.url.trim().is_empty() {
        return Err(Error::ScorerUnavailable("no entailment endpoint configured".into()));
    }
    let request = entailment_request(context, registry, &endpoint.model);
    let body = post_json(&endpoint.url, &request, None, endpoint.timeout).map_err(|e| match e {
        CallError::Transport(msg) => Error::ScorerUnavailable(msg),
        CallError::Malformed(msg) => Error::ProtocolError(msg),
    })?;
    parse_entailment_response(&body, request.hypotheses.len())
}

/// L1 normalization; an all-zero map yields uniform 1/6 weights.
pub fn normalize(raw: &DimensionScores) -> Result<DimensionScores> {
    let mut values = [0.0f64; 6];
    for dim in DimensionId::ALL {
        let value = *raw.get(&dim).ok_or(Error::IncompleteVector(dim))?;
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidScore {
                dimension: dim,
                value,
            });
        }
        values[dim.index()] = value;
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(DimensionId::ALL.iter().map(|d| (*d, 1.0 / 6.0)).collect());
    }
    // Scaling by the max first keeps the sum finite for huge inputs.
    let scaled = values.map(|v| v / max);
    let sum: f64 = scaled.iter().sum();
    Ok(DimensionId::ALL
        .iter()
        .map(|d| (*d, scaled[d.index()] / sum))
        .collect())
}

fn ordered(weights: &DimensionScores) -> Vec<(DimensionId, f64)> {
    let mut all: Vec<(DimensionId, f64)> = DimensionId::ALL
        .iter()
        .map(|d| (*d, weights.get(d).copied().unwrap_or(0.0)))
        .collect();
    // Stable sort keeps enum order among equal weights.
    all.sort_by(|a, b| b.1.total_cmp(&a.1));
    all
}

/// Top-k dimensions by weight, ties broken by dimension order.
pub fn dominant_dimensions(weights: &DimensionScores, k: usize) -> Vec<DimensionId> {
    ordered(weights).into_iter().take(k).map(|(d, _)| d).collect()
}

/// Every dimension whose weight reaches `threshold`, in weight order.
pub fn dominant_above(weights: &DimensionScores, threshold: f64) -> Vec<DimensionId> {
    ordered(weights)
        .into_iter()
        .filter(|(_, w)| *w >= threshold)
        .map(|(d, _)| d)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    TopK(usize),
    Threshold(f64),
}

impl Default for Selection {
    fn default() -> Self {
        Selection::TopK(DEFAULT_TOP_K)
    }
}

/// Scores, normalizes and selects. When `fallback` is given and the
/// scorer reports `ScorerUnavailable`, the lexical scorer is used instead
/// and the profile's `scorer_id` says so.
pub fn assess_salience(
    context: &UnifiedContext,
    registry: &Registry,
    scorer: &dyn SalienceScorer,
    fallback: Option<&LexicalScorer>,
    selection: Selection,
) -> Result<SalienceProfile> {
    let (raw, scorer_id) = match scorer.raw_scores(context, registry) {
        Ok(raw) => (raw, scorer.id()),
        Err(Error::ScorerUnavailable(_)) if fallback.is_some() => (
            fallback.expect("checked").score(context),
            LEXICAL_FALLBACK_ID.to_string(),
        ),
        Err(e) => return Err(e),
    };
    let weights = normalize(&raw)?;
    let dominant = match selection {
        Selection::TopK(k) => dominant_dimensions(&weights, k),
        Selection::Threshold(t) => dominant_above(&weights, t),
    };
    Ok(SalienceProfile {
        weights,
        dominant,
        scorer_id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{build_unified_context, Query, UserProfile};
    use crate::lexicon::Lexicons;
    use proptest::prelude::*;
    use serde_json::json;

    use DimensionId::*;

    fn scores(values: [f64; 6]) -> DimensionScores {
        DimensionId::ALL.iter().map(|d| (*d, values[d.index()])).collect()
    }

    fn context(goals: &[&str], query: &str) -> UnifiedContext {
        let profile = UserProfile {
            user_id: "u".into(),
            goals: goals.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        };
        build_unified_context(&profile, &Query::new(query), &Lexicons::bundled()).unwrap()
    }

    #[test]
    fn sarah_signals_raw_scores() {
        let ctx = context(
            &["healthy", "nutritious"],
            "I'm hungry and in a hurry, can you make something in 15 minutes?",
        );
        let raw = lexical_salience(&ctx, &Registry::bundled());
        assert_eq!(raw[&Urgency], 2.0 * 1.0 + 2.0);
        assert_eq!(raw[&GoalRelevance], 1.0 * 2.0 + 1.0);
    }

    #[test]
    fn zero_signal_raw_is_zero() {
        let ctx = context(&[], "what should I cook");
        let raw = lexical_salience(&ctx, &Registry::bundled());
        assert!(raw.values().all(|v| *v == 0.0));
    }

    #[test]
    fn one_query_keyword_adds_two_to_its_dimension_only() {
        let reg = Registry::bundled();
        let before = lexical_salience(&context(&["healthy"], "dinner for me"), &reg);
        let after = lexical_salience(&context(&["healthy"], "dinner for me asap"), &reg);
        for d in DimensionId::ALL {
            let delta = after[&d] - before[&d];
            assert_eq!(delta, if d == Urgency { 2.0 } else { 0.0 }, "{d}");
        }
    }

    #[test]
    fn normalize_arithmetic() {
        let w = normalize(&scores([4.0, 3.0, 1.0, 1.0, 1.0, 0.0])).unwrap();
        let expected = [4.0 / 10.0, 3.0 / 10.0, 0.1, 0.1, 0.1, 0.0];
        for d in DimensionId::ALL {
            assert!((w[&d] - expected[d.index()]).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_zero_is_uniform() {
        let w = normalize(&scores([0.0; 6])).unwrap();
        assert!(w.values().all(|v| *v == 1.0 / 6.0));
    }

    #[test]
    fn normalize_single_nonzero() {
        let w = normalize(&scores([0.0, 0.0, 0.0, 7.5, 0.0, 0.0])).unwrap();
        assert_eq!(w[&Urgency], 1.0);
        assert_eq!(w.values().filter(|v| **v == 0.0).count(), 5);
    }

    #[test]
    fn normalize_rejects_bad_scores() {
        assert!(matches!(
            normalize(&scores([1.0, -0.5, 0.0, 0.0, 0.0, 0.0])),
            Err(Error::InvalidScore { dimension: GoalRelevance, .. })
        ));
        assert!(matches!(
            normalize(&scores([f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0])),
            Err(Error::InvalidScore { .. })
        ));
        let mut partial = scores([1.0; 6]);
        partial.remove(&Agency);
        assert!(matches!(normalize(&partial), Err(Error::IncompleteVector(Agency))));
    }

    #[test]
    fn dominant_tie_break_and_k() {
        let uniform = normalize(&scores([0.0; 6])).unwrap();
        assert_eq!(
            dominant_dimensions(&uniform, 3),
            vec![PredictabilitySurprise, GoalRelevance, Valence]
        );
        let w = normalize(&scores([1.0, 3.0, 0.0, 4.0, 1.0, 0.0])).unwrap();
        assert_eq!(
            dominant_dimensions(&w, 6),
            vec![Urgency, GoalRelevance, PredictabilitySurprise, Agency, Valence, NormativeSignificance]
        );
        assert_eq!(dominant_dimensions(&w, 10).len(), 6);
    }

    #[test]
    fn threshold_selection() {
        let w = normalize(&scores([1.0, 3.0, 0.0, 4.0, 2.0, 0.0])).unwrap();
        assert_eq!(dominant_above(&w, 0.2), vec![Urgency, GoalRelevance, Agency]);
    }

    #[test]
    fn response_is_keyed_not_positional() {
        let body = json!({"scores": [
            {"dimension": "Urgency", "entailment": 0.95},
            {"dimension": "PredictabilitySurprise", "entailment": 0.9},
            {"dimension": "NormativeSignificance", "entailment": 0.1},
            {"dimension": "GoalRelevance", "entailment": 0.7},
            {"dimension": "Agency", "entailment": 0.2},
            {"dimension": "Valence", "entailment": 0.3}
        ]});
        let raw = parse_entailment_response(&body, 6).unwrap();
        assert_eq!(raw, scores([0.9, 0.7, 0.3, 0.95, 0.2, 0.1]));
    }

    #[test]
    fn response_arity_and_content_checks() {
        let five = json!({"scores": DimensionId::ALL[..5].iter()
            .map(|d| json!({"dimension": d, "entailment": 0.5})).collect::<Vec<_>>()});
        assert!(matches!(parse_entailment_response(&five, 6), Err(Error::ProtocolError(_))));

        let dup = json!({"scores": (0..6).map(|_| json!({"dimension": "Urgency", "entailment": 0.5})).collect::<Vec<_>>()});
        assert!(matches!(parse_entailment_response(&dup, 6), Err(Error::ProtocolError(_))));

        let out_of_range = json!({"scores": DimensionId::ALL.iter()
            .map(|d| json!({"dimension": d, "entailment": 1.5})).collect::<Vec<_>>()});
        assert!(matches!(parse_entailment_response(&out_of_range, 6), Err(Error::ProtocolError(_))));

        assert!(matches!(parse_entailment_response(&json!({}), 6), Err(Error::ProtocolError(_))));
    }

    #[test]
    fn request_carries_canonical_statements() {
        let reg = Registry::bundled();
        let ctx = context(&["healthy"], "quick dinner");
        let req = entailment_request(&ctx, &reg, DEFAULT_NLI_MODEL);
        assert_eq!(req.premise, ctx.composite_text);
        assert_eq!(req.hypotheses.len(), 6);
        assert_eq!(
            req.hypotheses[3].text,
            "This situation requires an immediate, time-critical response."
        );
    }

    proptest! {
        #[test]
        fn weights_sum_to_one(values in prop::array::uniform6(0.0f64..1e6)) {
            let w = normalize(&scores(values)).unwrap();
            let sum: f64 = w.values().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            prop_assert!(w.values().all(|v| (0.0..=1.0).contains(v)));
        }

        #[test]
        fn ranking_is_scale_invariant(ints in prop::array::uniform6(0u32..100), c in 1e-3f64..1e3) {
            let values = ints.map(f64::from);
            let base = dominant_dimensions(&normalize(&scores(values)).unwrap(), 6);
            let scaled = dominant_dimensions(&normalize(&scores(values.map(|v| v * c))).unwrap(), 6);
            prop_assert_eq!(base, scaled);
        }
    }
}
