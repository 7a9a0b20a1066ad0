//! Per-dimension candidate scoring, salience-weighted composites and the
//! deterministic ranking built on them.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::context::UnifiedContext;
use crate::error::{Error, Result};
use crate::lexicon::Lexicons;
use crate::registry::DimensionId;
use crate::salience::{DimensionScores, SalienceProfile};
use crate::text::{normalize_keyword, token_set, tokenize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Candidate {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub prep_time_minutes: u32,
    #[serde(default)]
    pub ingredients: Vec<String>,
    #[serde(default)]
    pub tags: Vec<String>,
    /// Number of documented substitutions.
    #[serde(default)]
    pub customization_options: u32,
}

impl Candidate {
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidCandidate {
            candidate: self.id.clone(),
            reason: reason.to_string(),
        };
        if self.id.trim().is_empty() {
            return Err(invalid("empty id"));
        }
        if self.prep_time_minutes < 1 {
            return Err(invalid("prep_time_minutes must be at least 1"));
        }
        Ok(())
    }

    /// Tokens of name, description and tags.
    pub fn terms(&self) -> BTreeSet<String> {
        token_set(
            [self.name.as_str(), self.description.as_str()]
                .into_iter()
                .chain(self.tags.iter().map(String::as_str)),
        )
    }
}

/// Tunable constants of the per-dimension formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default)]
pub struct ScoringConstants {
    pub urgency_time_weight: f64,
    pub urgency_keyword_weight: f64,
    /// Keyword hits at which the urgency keyword term saturates.
    pub urgency_keyword_saturation: f64,
    /// Customization options plus agency tags at which Agency saturates.
    pub agency_saturation: f64,
}

impl Default for ScoringConstants {
    fn default() -> Self {
        ScoringConstants {
            urgency_time_weight: 0.7,
            urgency_keyword_weight: 0.3,
            urgency_keyword_saturation: 2.0,
            agency_saturation: 3.0,
        }
    }
}

impl ScoringConstants {
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (name, w) in [
            ("urgency_time_weight", self.urgency_time_weight),
            ("urgency_keyword_weight", self.urgency_keyword_weight),
        ] {
            if !(0.0..=1.0).contains(&w) {
                return Err(format!("scoring.{name} must lie in [0,1], got {w}"));
            }
        }
        for (name, s) in [
            ("urgency_keyword_saturation", self.urgency_keyword_saturation),
            ("agency_saturation", self.agency_saturation),
        ] {
            if !(s.is_finite() && s > 0.0) {
                return Err(format!("scoring.{name} must be positive, got {s}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AppraisalVector {
    pub candidate_id: String,
    pub scores: DimensionScores,
    pub evidence: BTreeMap<DimensionId, Vec<String>>,
}

impl AppraisalVector {
    pub fn score(&self, dim: DimensionId) -> f64 {
        self.scores.get(&dim).copied().unwrap_or(0.0)
    }

    pub fn evidence(&self, dim: DimensionId) -> &[String] {
        self.evidence.get(&dim).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RankedEntry {
    pub candidate_id: String,
    pub composite: f64,
    pub vector: AppraisalVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Exclusion {
    pub candidate_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RankedList {
    pub entries: Vec<RankedEntry>,
    pub excluded: Vec<Exclusion>,
}

impl RankedList {
    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.candidate_id.as_str()).collect()
    }

    /// Zero-based rank of `id`, `None` if excluded or absent.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.candidate_id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankOptions {
    pub filter_normative: bool,
    /// Score candidates on the rayon pool. Ignored without the `parallel`
    /// feature.
    pub parallel: bool,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            filter_normative: true,
            parallel: true,
        }
    }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn quoted(words: &[&str]) -> String {
    words
        .iter()
        .map(|w| format!("'{w}'"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Scores candidates against one fixed context. Context-derived lookups
/// are computed once so the per-candidate work stays small.
pub struct CandidateScorer<'a> {
    context: &'a UnifiedContext,
    lexicons: &'a Lexicons,
    constants: &'a ScoringConstants,
    familiar: BTreeSet<String>,
}

impl<'a> CandidateScorer<'a> {
    pub fn new(
        context: &'a UnifiedContext,
        lexicons: &'a Lexicons,
        constants: &'a ScoringConstants,
    ) -> Self {
        let familiar = context
            .profile
            .familiar_items
            .iter()
            .map(|s| normalize_keyword(s))
            .filter(|s| !s.is_empty())
            .collect();
        CandidateScorer {
            context,
            lexicons,
            constants,
            familiar,
        }
    }

    pub fn score(&self, candidate: &Candidate) -> AppraisalVector {
        let terms = candidate.terms();
        let mut scores = DimensionScores::new();
        let mut evidence = BTreeMap::new();
        for dim in DimensionId::ALL {
            let (score, ev) = self.dimension_with_terms(candidate, dim, &terms);
            scores.insert(dim, score);
            evidence.insert(dim, ev);
        }
        AppraisalVector {
            candidate_id: candidate.id.clone(),
            scores,
            evidence,
        }
    }

    pub fn dimension(&self, candidate: &Candidate, dim: DimensionId) -> (f64, Vec<String>) {
        self.dimension_with_terms(candidate, dim, &candidate.terms())
    }

    fn dimension_with_terms(
        &self,
        candidate: &Candidate,
        dim: DimensionId,
        terms: &BTreeSet<String>,
    ) -> (f64, Vec<String>) {
        match dim {
            DimensionId::Urgency => self.urgency(candidate, terms),
            DimensionId::GoalRelevance => self.goal_relevance(terms),
            DimensionId::Valence => self.valence(candidate),
            DimensionId::PredictabilitySurprise => self.predictability(candidate),
            DimensionId::Agency => self.agency(candidate),
            DimensionId::NormativeSignificance => self.normative(candidate),
        }
    }

    fn urgency(&self, candidate: &Candidate, terms: &BTreeSet<String>) -> (f64, Vec<String>) {
        let c = self.constants;
        let prep = candidate.prep_time_minutes;
        let mut evidence = Vec::new();
        let time_fit = match self.context.time_constraint_minutes {
            None => {
                evidence.push(format!("no time limit given; takes {prep} minutes"));
                1.0
            }
            Some(limit) => {
                let over = prep.saturating_sub(limit);
                if over == 0 {
                    evidence.push(format!(
                        "ready in {prep} minutes, within the {limit} minutes you have"
                    ));
                } else {
                    evidence.push(format!(
                        "takes {prep} minutes, {over} over the {limit} minutes you have"
                    ));
                }
                clamp01(1.0 - over as f64 / limit as f64)
            }
        };
        let cues: Vec<&str> = terms
            .iter()
            .filter(|t| self.lexicons.is_cue(DimensionId::Urgency, t))
            .map(String::as_str)
            .collect();
        if !cues.is_empty() {
            evidence.push(format!("described as {}", quoted(&cues)));
        }
        let keyword_fit = (cues.len() as f64 / c.urgency_keyword_saturation).min(1.0);
        let score = clamp01(c.urgency_time_weight * time_fit + c.urgency_keyword_weight * keyword_fit);
        (score, evidence)
    }

    fn goal_relevance(&self, terms: &BTreeSet<String>) -> (f64, Vec<String>) {
        let goals = &self.context.profile.goals;
        let matched: Vec<&str> = goals
            .iter()
            .filter(|g| {
                let tokens = tokenize(g);
                !tokens.is_empty() && tokens.iter().all(|t| terms.contains(t))
            })
            .map(String::as_str)
            .collect();
        let score = matched.len() as f64 / goals.len().max(1) as f64;
        let evidence = matched
            .iter()
            .map(|g| format!("supports your goal '{g}'"))
            .collect();
        (clamp01(score), evidence)
    }

    fn valence(&self, candidate: &Candidate) -> (f64, Vec<String>) {
        let tally = crate::context::tally_sentiment(&candidate.description, &self.lexicons.sentiment);
        let (pos, neg) = (tally.positive_hits as f64, tally.negative_hits as f64);
        let score = clamp01(0.5 + 0.5 * (pos - neg) / (pos + neg).max(1.0));
        let mut evidence = Vec::new();
        let distinct = |words: &[String]| -> Vec<String> {
            let mut out: Vec<String> = Vec::new();
            for w in words {
                if !out.contains(w) {
                    out.push(w.clone());
                }
            }
            out
        };
        let positive = distinct(&tally.positive_words);
        let negative = distinct(&tally.negative_words);
        if !positive.is_empty() {
            let words: Vec<&str> = positive.iter().map(String::as_str).collect();
            evidence.push(format!("described as {}", quoted(&words)));
        }
        if !negative.is_empty() {
            let words: Vec<&str> = negative.iter().map(String::as_str).collect();
            evidence.push(format!("also described as {}", quoted(&words)));
        }
        if tally.total() == 0 {
            evidence.push("neutral description with no sentiment cues".to_string());
        }
        (score, evidence)
    }

    fn predictability(&self, candidate: &Candidate) -> (f64, Vec<String>) {
        let items: BTreeSet<String> = candidate
            .tags
            .iter()
            .chain(&candidate.ingredients)
            .map(|s| normalize_keyword(s))
            .filter(|s| !s.is_empty())
            .collect();
        let common: Vec<&str> = items
            .intersection(&self.familiar)
            .map(String::as_str)
            .collect();
        let union = items.union(&self.familiar).count();
        if common.is_empty() || union == 0 {
            return (0.0, Vec::new());
        }
        let score = common.len() as f64 / union as f64;
        (
            clamp01(score),
            vec![format!("familiar to you: {}", common.join(", "))],
        )
    }

    fn agency(&self, candidate: &Candidate) -> (f64, Vec<String>) {
        let tagged: Vec<&str> = candidate
            .tags
            .iter()
            .filter(|tag| {
                tokenize(tag)
                    .iter()
                    .any(|t| self.lexicons.is_cue(DimensionId::Agency, t))
            })
            .map(String::as_str)
            .collect();
        let total = candidate.customization_options as f64 + tagged.len() as f64;
        let score = (total / self.constants.agency_saturation).min(1.0);
        let mut evidence = Vec::new();
        match candidate.customization_options {
            0 => {}
            1 => evidence.push("1 documented substitution".to_string()),
            n => evidence.push(format!("{n} documented substitutions")),
        }
        if !tagged.is_empty() {
            evidence.push(format!("tagged {}", quoted(&tagged)));
        }
        (clamp01(score), evidence)
    }

    fn normative(&self, candidate: &Candidate) -> (f64, Vec<String>) {
        let constraints = &self.context.profile.dietary_constraints;
        if constraints.is_empty() {
            return (1.0, vec!["no dietary constraints to check".to_string()]);
        }
        let tags: BTreeSet<String> = candidate.tags.iter().map(|t| normalize_keyword(t)).collect();
        let mut satisfied = Vec::new();
        let mut violated = Vec::new();
        for constraint in constraints {
            match self.lexicons.forbidden_for(constraint) {
                Some(forbidden) => {
                    let offending: Vec<&str> = candidate
                        .ingredients
                        .iter()
                        .filter(|ing| tokenize(ing).iter().any(|t| forbidden.contains(t)))
                        .map(String::as_str)
                        .collect();
                    if offending.is_empty() {
                        satisfied.push(format!("respects your {constraint} constraint"));
                    } else {
                        violated.push(format!(
                            "violates your {constraint} constraint: contains {}",
                            offending.join(", ")
                        ));
                    }
                }
                // No ingredient table for this tag: rely on the candidate's own labelling.
                None if tags.contains(constraint) => {
                    satisfied.push(format!("labelled {constraint}"))
                }
                None => violated.push(format!(
                    "violates your {constraint} constraint: not labelled {constraint}"
                )),
            }
        }
        if violated.is_empty() {
            (1.0, satisfied)
        } else {
            (0.0, violated)
        }
    }
}

/// Score of one candidate on one dimension, with the evidence behind it.
pub fn score_dimension(
    candidate: &Candidate,
    dim: DimensionId,
    context: &UnifiedContext,
    lexicons: &Lexicons,
    constants: &ScoringConstants,
) -> (f64, Vec<String>) {
    CandidateScorer::new(context, lexicons, constants).dimension(candidate, dim)
}

/// Salience-weighted sum of a vector's six dimension scores.
pub fn composite_score(vector: &AppraisalVector, salience: &SalienceProfile) -> Result<f64> {
    let mut total = 0.0;
    for dim in DimensionId::ALL {
        let score = vector.scores.get(&dim).ok_or(Error::IncompleteVector(dim))?;
        let weight = salience.weights.get(&dim).ok_or(Error::IncompleteVector(dim))?;
        total += weight * score;
    }
    Ok(clamp01(total))
}

fn by_composite(a: &RankedEntry, b: &RankedEntry) -> Ordering {
    b.composite
        .total_cmp(&a.composite)
        .then_with(|| a.candidate_id.cmp(&b.candidate_id))
}

/// Scores every candidate. Output order matches input order regardless of
/// whether the rayon pool is used.
pub fn score_candidates(
    candidates: &[Candidate],
    context: &UnifiedContext,
    lexicons: &Lexicons,
    constants: &ScoringConstants,
    parallel: bool,
) -> Vec<AppraisalVector> {
    let scorer = CandidateScorer::new(context, lexicons, constants);
    #[cfg(feature = "parallel")]
    if parallel {
        return candidates.par_iter().map(|c| scorer.score(c)).collect();
    }
    let _ = parallel;
    candidates.iter().map(|c| scorer.score(c)).collect()
}

/// Filters (optionally) and sorts precomputed vectors: composite
/// descending, then candidate id ascending.
pub fn rank_vectors(
    vectors: Vec<AppraisalVector>,
    salience: &SalienceProfile,
    filter_normative: bool,
) -> Result<RankedList> {
    let mut entries = Vec::with_capacity(vectors.len());
    let mut excluded = Vec::new();
    for vector in vectors {
        if filter_normative && vector.score(DimensionId::NormativeSignificance) == 0.0 {
            let reason = match vector.evidence(DimensionId::NormativeSignificance) {
                [] => "violates a dietary constraint".to_string(),
                ev => ev.join("; "),
            };
            excluded.push(Exclusion {
                candidate_id: vector.candidate_id,
                reason,
            });
            continue;
        }
        entries.push(RankedEntry {
            candidate_id: vector.candidate_id.clone(),
            composite: composite_score(&vector, salience)?,
            vector,
        });
    }
    entries.sort_by(by_composite);
    excluded.sort_by(|a, b| a.candidate_id.cmp(&b.candidate_id));
    Ok(RankedList { entries, excluded })
}

pub fn rank_candidates(
    candidates: &[Candidate],
    context: &UnifiedContext,
    salience: &SalienceProfile,
    lexicons: &Lexicons,
    constants: &ScoringConstants,
    options: RankOptions,
) -> Result<RankedList> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let mut ids = BTreeSet::new();
    for c in candidates {
        c.validate()?;
        if !ids.insert(c.id.as_str()) {
            return Err(Error::DuplicateCandidate(c.id.clone()));
        }
    }
    let vectors = score_candidates(candidates, context, lexicons, constants, options.parallel);
    rank_vectors(vectors, salience, options.filter_normative)
}
