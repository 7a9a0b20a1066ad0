//! Deterministic realizers: the appraisal template and the surface-level
//! baseline used when no language model is involved.

use std::collections::BTreeSet;

use crate::context::UnifiedContext;
use crate::scoring::Candidate;
use crate::text::content_tokens;

use super::plan::ExplanationPlan;

/// Recommendation sentence, one sentence per dominant dimension quoting its
/// evidence, and a closing sentence on dietary constraints. Same plan,
/// same bytes.
pub fn realize_template(plan: &ExplanationPlan) -> String {
    let c = &plan.candidate;
    let mut lines = vec![format!(
        "I recommend {} ({} minutes).",
        c.name, c.prep_time_minutes
    )];

    for dominant in &plan.dominant {
        let justification = plan.justification(dominant.dimension);
        let evidence = justification.map(|j| j.evidence.as_slice()).unwrap_or(&[]);
        let line = if evidence.is_empty() {
            let score = justification.map(|j| j.score).unwrap_or(0.0);
            format!(
                "{} matters to you ({} priority), and this recipe scores {score:.2} on it.",
                dominant.display_name,
                dominant.label.as_str()
            )
        } else {
            format!(
                "{} matters to you ({} priority), and this recipe fits because {}.",
                dominant.display_name,
                dominant.label.as_str(),
                evidence.join("; ")
            )
        };
        lines.push(line);
    }

    let closing = if plan.dietary_constraints.is_empty() {
        "No dietary constraints applied to this request.".to_string()
    } else if plan.meets_constraints() {
        format!(
            "It also respects your dietary constraints: {}.",
            plan.dietary_constraints.join(", ")
        )
    } else {
        format!(
            "Note that it does not meet your dietary constraints: {}.",
            plan.dietary_constraints.join(", ")
        )
    };
    lines.push(closing);

    let mut text = lines.join("\n");
    text.push('\n');
    text
}

/// The candidate a literal reading of the request would pick: one that
/// fits a stated time limit if any does, then the most query words shared
/// with the candidate, first in input order on ties.
pub fn baseline_choice<'a>(context: &UnifiedContext, candidates: &'a [Candidate]) -> Option<&'a Candidate> {
    let query: BTreeSet<String> = content_tokens(&context.query.text).into_iter().collect();
    let mut best: Option<(&Candidate, (bool, usize))> = None;
    for c in candidates {
        let fits = context
            .time_constraint_minutes
            .is_none_or(|limit| c.prep_time_minutes <= limit);
        let key = (fits, c.terms().intersection(&query).count());
        if best.is_none_or(|(_, b)| key > b) {
            best = Some((c, key));
        }
    }
    best.map(|(c, _)| c)
}

/// Non-appraisal explanation built from the request and the candidate
/// text alone.
pub fn realize_baseline_template(context: &UnifiedContext, candidates: &[Candidate]) -> String {
    let Some(choice) = baseline_choice(context, candidates) else {
        return "No candidate recipes were available.\n".to_string();
    };
    let description = choice.description.trim();
    let mut text = format!("Try {}.", choice.name);
    if !description.is_empty() {
        text.push(' ');
        text.push_str(description);
        if !description.ends_with('.') {
            text.push('.');
        }
    }
    let terms = choice.terms();
    let shared: Vec<String> = content_tokens(&context.query.text)
        .into_iter()
        .filter(|t| terms.contains(t))
        .collect();
    text.push_str(&format!(
        " It takes about {} minutes to make",
        choice.prep_time_minutes
    ));
    if shared.is_empty() {
        text.push_str(".\n");
    } else {
        text.push_str(&format!(" and matches your request for {}.\n", shared.join(", ")));
    }
    text
}
