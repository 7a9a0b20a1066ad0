use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::context::UnifiedContext;
use crate::error::{Error, Result};
use crate::registry::{DimensionId, Registry};
use crate::salience::SalienceProfile;
use crate::scoring::{Candidate, RankedList};

pub const HIGH_SALIENCE: f64 = 0.25;
pub const MEDIUM_SALIENCE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum SalienceLabel {
    High,
    Medium,
    Low,
}

impl SalienceLabel {
    pub fn from_weight(weight: f64) -> SalienceLabel {
        if weight >= HIGH_SALIENCE {
            SalienceLabel::High
        } else if weight >= MEDIUM_SALIENCE {
            SalienceLabel::Medium
        } else {
            SalienceLabel::Low
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SalienceLabel::High => "high",
            SalienceLabel::Medium => "medium",
            SalienceLabel::Low => "low",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DominantAppraisal {
    pub dimension: DimensionId,
    pub display_name: String,
    pub weight: f64,
    pub label: SalienceLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DimensionJustification {
    pub dimension: DimensionId,
    pub display_name: String,
    pub weight: f64,
    pub score: f64,
    pub evidence: Vec<String>,
}

/// Everything a realizer needs to justify the winning candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ExplanationPlan {
    pub candidate: Candidate,
    pub dominant: Vec<DominantAppraisal>,
    /// All six dimensions, highest salience weight first.
    pub per_dimension: Vec<DimensionJustification>,
    pub context_summary: String,
    pub composite: f64,
    pub time_constraint_minutes: Option<u32>,
    pub dietary_constraints: Vec<String>,
}

impl ExplanationPlan {
    pub fn justification(&self, dim: DimensionId) -> Option<&DimensionJustification> {
        self.per_dimension.iter().find(|j| j.dimension == dim)
    }

    pub fn meets_constraints(&self) -> bool {
        self.justification(DimensionId::NormativeSignificance)
            .map(|j| j.score > 0.0)
            .unwrap_or(true)
    }
}

pub fn context_summary(context: &UnifiedContext) -> String {
    let mut parts = Vec::new();
    if !context.profile.goals.is_empty() {
        parts.push(format!("goals: {}", context.profile.goals.join(", ")));
    }
    if let Some(limit) = context.time_constraint_minutes {
        parts.push(format!("time limit: {limit} minutes"));
    }
    let cues = context.query_cues();
    if !cues.is_empty() {
        parts.push(format!("query cues: {}", cues.join(", ")));
    }
    if !context.profile.dietary_constraints.is_empty() {
        parts.push(format!(
            "dietary constraints: {}",
            context.profile.dietary_constraints.join(", ")
        ));
    }
    if parts.is_empty() {
        "no explicit goals or cues".to_string()
    } else {
        parts.join("; ")
    }
}

/// Plan for the top-ranked entry. `candidates` must contain that entry's
/// candidate.
pub fn build_plan(
    ranked: &RankedList,
    salience: &SalienceProfile,
    context: &UnifiedContext,
    candidates: &[Candidate],
    registry: &Registry,
) -> Result<ExplanationPlan> {
    let top = ranked.entries.first().ok_or(Error::NothingToExplain)?;
    let candidate = candidates
        .iter()
        .find(|c| c.id == top.candidate_id)
        .cloned()
        .ok_or_else(|| Error::InvalidCandidate {
            candidate: top.candidate_id.clone(),
            reason: "ranked candidate missing from candidate list".into(),
        })?;

    let dominant = salience
        .dominant
        .iter()
        .map(|&dim| {
            let weight = salience.weight(dim);
            DominantAppraisal {
                dimension: dim,
                display_name: registry.display_name(dim).to_string(),
                weight,
                label: SalienceLabel::from_weight(weight),
            }
        })
        .collect();

    let mut per_dimension: Vec<DimensionJustification> = DimensionId::ALL
        .iter()
        .map(|&dim| DimensionJustification {
            dimension: dim,
            display_name: registry.display_name(dim).to_string(),
            weight: salience.weight(dim),
            score: top.vector.score(dim),
            evidence: top.vector.evidence(dim).to_vec(),
        })
        .collect();
    per_dimension.sort_by(|a, b| b.weight.total_cmp(&a.weight));

    Ok(ExplanationPlan {
        candidate,
        dominant,
        per_dimension,
        context_summary: context_summary(context),
        composite: top.composite,
        time_constraint_minutes: context.time_constraint_minutes,
        dietary_constraints: context.profile.dietary_constraints.clone(),
    })
}
