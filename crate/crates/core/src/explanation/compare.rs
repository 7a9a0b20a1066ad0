use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::registry::DimensionId;

use super::plan::ExplanationPlan;

/// What one explanation text mentions of the plan's dominant appraisals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct TextMentions {
    /// Dominant dimensions whose display name occurs in the text.
    pub dimensions_named: Vec<DimensionId>,
    /// Evidence strings of dominant dimensions found verbatim.
    pub evidence_cited: Vec<String>,
    pub chars: usize,
    pub words: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ComparisonReport {
    pub dominant: Vec<DimensionId>,
    pub appraisal: TextMentions,
    pub baseline: TextMentions,
}

pub fn mentions(text: &str, plan: &ExplanationPlan) -> TextMentions {
    let haystack = text.to_lowercase();
    let dimensions_named = plan
        .dominant
        .iter()
        .filter(|d| haystack.contains(&d.display_name.to_lowercase()))
        .map(|d| d.dimension)
        .collect();
    let mut evidence_cited: Vec<String> = Vec::new();
    for d in &plan.dominant {
        let Some(j) = plan.justification(d.dimension) else {
            continue;
        };
        for ev in &j.evidence {
            if haystack.contains(&ev.to_lowercase()) && !evidence_cited.contains(ev) {
                evidence_cited.push(ev.clone());
            }
        }
    }
    TextMentions {
        dimensions_named,
        evidence_cited,
        chars: text.chars().count(),
        words: text.split_whitespace().count(),
    }
}

/// Structural side-by-side of an appraisal and a baseline explanation.
/// No judgment of quality.
pub fn compare(appraisal_text: &str, baseline_text: &str, plan: &ExplanationPlan) -> ComparisonReport {
    ComparisonReport {
        dominant: plan.dominant.iter().map(|d| d.dimension).collect(),
        appraisal: mentions(appraisal_text, plan),
        baseline: mentions(baseline_text, plan),
    }
}
