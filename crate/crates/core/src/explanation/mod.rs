//! From a ranked list to explanation text: plan building, the template
//! and chat-model realizers, the non-appraisal baseline and a structural
//! comparison of the two.

mod compare;
mod llm;
mod plan;
mod prompt;
mod template;

pub use compare::{compare, mentions, ComparisonReport, TextMentions};
pub use llm::{chat_request, realize_llm, ChatEndpoint, RunLog, RunRecord, DEFAULT_CHAT_MODEL};
pub use plan::{
    build_plan, context_summary, DimensionJustification, DominantAppraisal, ExplanationPlan,
    SalienceLabel, HIGH_SALIENCE, MEDIUM_SALIENCE,
};
pub use prompt::{
    build_prompt, PromptBundle, PromptMode, PromptPayload, PromptSection, PromptTemplates,
    SectionTemplate,
};
pub use template::{baseline_choice, realize_baseline_template, realize_template};

use chrono::Utc;

use crate::context::UnifiedContext;
use crate::error::{Error, Result};
use crate::scoring::Candidate;

#[derive(Debug, Clone)]
pub enum Realizer {
    Template,
    Llm(ChatEndpoint),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub text: String,
    /// The template stood in for an unreachable chat endpoint.
    pub fallback: bool,
}

fn log_template(log: &mut RunLog, bundle: &PromptBundle, text: &str, fallback: Option<String>) {
    let now = Utc::now();
    log.push(RunRecord {
        mode: bundle.mode,
        realizer: if fallback.is_some() { "template-fallback" } else { "template" }.into(),
        fallback: fallback.is_some(),
        prompt: Some(serde_json::to_value(bundle).expect("bundle serializes")),
        response: None,
        error: fallback,
        text: text.to_string(),
        started_at: now,
        finished_at: now,
    });
}

fn realize_with(
    bundle: &PromptBundle,
    realizer: &Realizer,
    allow_fallback: bool,
    log: &mut RunLog,
    template: impl FnOnce() -> String,
) -> Result<Realization> {
    match realizer {
        Realizer::Template => {
            let text = template();
            log_template(log, bundle, &text, None);
            Ok(Realization { text, fallback: false })
        }
        Realizer::Llm(endpoint) => match realize_llm(bundle, endpoint, log) {
            Ok(text) => Ok(Realization { text, fallback: false }),
            Err(Error::RealizerUnavailable(msg)) if allow_fallback => {
                let text = template();
                log_template(log, bundle, &text, Some(msg));
                Ok(Realization { text, fallback: true })
            }
            Err(e) => Err(e),
        },
    }
}

/// Appraisal-conditioned explanation of the plan's candidate.
pub fn realize_appraisal(
    plan: &ExplanationPlan,
    context: &UnifiedContext,
    realizer: &Realizer,
    templates: &PromptTemplates,
    allow_fallback: bool,
    log: &mut RunLog,
) -> Result<Realization> {
    let bundle = build_prompt(PromptPayload::Plan { plan, context }, PromptMode::Appraisal, templates)?;
    realize_with(&bundle, realizer, allow_fallback, log, || realize_template(plan))
}

/// Baseline explanation from the surface-level request only.
pub fn realize_baseline(
    context: &UnifiedContext,
    candidates: &[Candidate],
    realizer: &Realizer,
    templates: &PromptTemplates,
    allow_fallback: bool,
    log: &mut RunLog,
) -> Result<Realization> {
    let bundle = build_prompt(
        PromptPayload::Context { context, candidates },
        PromptMode::Baseline,
        templates,
    )?;
    realize_with(&bundle, realizer, allow_fallback, log, || {
        realize_baseline_template(context, candidates)
    })
}
