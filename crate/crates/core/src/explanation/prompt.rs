//! Prompt assembly from an editable template file.

use std::collections::BTreeMap;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::context::UnifiedContext;
use crate::error::{Error, Result};
use crate::scoring::Candidate;

use super::plan::ExplanationPlan;

const BUNDLED_PROMPTS: &str = include_str!("../../data/prompts.toml");

const APPRAISAL_SECTIONS: [&str; 5] = [
    "profile",
    "situation",
    "appraisals",
    "recipe",
    "instruction_appraisal",
];
const BASELINE_SECTIONS: [&str; 4] = ["profile", "situation", "candidates", "instruction_baseline"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum PromptMode {
    Appraisal,
    Baseline,
}

impl PromptMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PromptMode::Appraisal => "appraisal",
            PromptMode::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct SectionTemplate {
    pub key: String,
    pub label: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct PromptTemplates {
    pub system: String,
    pub sections: Vec<SectionTemplate>,
}

impl PromptTemplates {
    pub fn bundled() -> PromptTemplates {
        PromptTemplates::parse(BUNDLED_PROMPTS).expect("bundled prompt templates are valid")
    }

    /// Parses a prompt-template TOML document and checks that every section
    /// either mode needs is present.
    pub fn parse(text: &str) -> Result<PromptTemplates> {
        let templates: PromptTemplates =
            toml::from_str(text).map_err(|e| Error::Template(e.to_string()))?;
        for key in APPRAISAL_SECTIONS.iter().chain(&BASELINE_SECTIONS) {
            if templates.section(key).is_none() {
                return Err(Error::Template(format!("missing section `{key}`")));
            }
        }
        Ok(templates)
    }

    fn section(&self, key: &str) -> Option<&SectionTemplate> {
        self.sections.iter().find(|s| s.key == key)
    }

    fn render(&self, key: &str, values: &BTreeMap<&str, String>) -> Result<PromptSection> {
        let section = self
            .section(key)
            .ok_or_else(|| Error::Template(format!("missing section `{key}`")))?;
        Ok(PromptSection {
            label: section.label.clone(),
            body: fill(&section.body, values)?,
        })
    }
}

/// Replaces `{name}` placeholders. Braces not enclosing an identifier are
/// copied through; an unknown identifier is an error.
fn fill(body: &str, values: &BTreeMap<&str, String>) -> Result<String> {
    let mut out = String::with_capacity(body.len());
    let mut rest = body;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after.find('}');
        let name = close.map(|c| &after[..c]);
        match name {
            Some(name)
                if !name.is_empty()
                    && name.chars().all(|ch| ch.is_ascii_lowercase() || ch == '_') =>
            {
                let value = values
                    .get(name)
                    .ok_or_else(|| Error::Template(format!("unknown placeholder `{{{name}}}`")))?;
                out.push_str(value);
                rest = &after[name.len() + 1..];
            }
            _ => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct PromptSection {
    pub label: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct PromptBundle {
    pub system_instruction: String,
    pub sections: Vec<PromptSection>,
    pub mode: PromptMode,
}

impl PromptBundle {
    /// Sections concatenated into the single user message sent to a chat
    /// model.
    pub fn user_message(&self) -> String {
        self.sections
            .iter()
            .map(|s| format!("## {}\n{}", s.label, s.body))
            .collect::<Vec<_>>()
            .join("\n\n")
    }

    pub fn section(&self, label: &str) -> Option<&PromptSection> {
        self.sections.iter().find(|s| s.label == label)
    }
}

pub enum PromptPayload<'a> {
    Plan {
        plan: &'a ExplanationPlan,
        context: &'a UnifiedContext,
    },
    Context {
        context: &'a UnifiedContext,
        candidates: &'a [Candidate],
    },
}

fn or_none(items: &[String]) -> String {
    if items.is_empty() {
        "none".to_string()
    } else {
        items.join(", ")
    }
}

fn context_values(context: &UnifiedContext) -> BTreeMap<&'static str, String> {
    let p = &context.profile;
    let description = if p.description.trim().is_empty() {
        "No profile description.".to_string()
    } else {
        p.description.trim().to_string()
    };
    BTreeMap::from([
        ("description", description),
        ("goals", or_none(&p.goals)),
        ("preferences", or_none(&p.preference_keywords)),
        ("constraints", or_none(&p.dietary_constraints)),
        ("familiar", or_none(&p.familiar_items)),
        ("query", context.query.text.trim().to_string()),
        (
            "time_limit",
            context
                .time_constraint_minutes
                .map(|m| format!("{m} minutes"))
                .unwrap_or_else(|| "not stated".to_string()),
        ),
    ])
}

fn plan_values(plan: &ExplanationPlan) -> BTreeMap<&'static str, String> {
    let c = &plan.candidate;
    let dominant = if plan.dominant.is_empty() {
        "- none".to_string()
    } else {
        plan.dominant
            .iter()
            .map(|d| format!("- {}: {} (weight {:.2})", d.display_name, d.label.as_str(), d.weight))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let evidence = plan
        .per_dimension
        .iter()
        .map(|j| {
            let ev = if j.evidence.is_empty() {
                "no specific evidence".to_string()
            } else {
                j.evidence.join("; ")
            };
            format!("- {} (score {:.2}): {ev}", j.display_name, j.score)
        })
        .collect::<Vec<_>>()
        .join("\n");
    BTreeMap::from([
        ("dominant_appraisals", dominant),
        ("recipe_name", c.name.clone()),
        ("recipe_description", c.description.trim().to_string()),
        ("prep_time", c.prep_time_minutes.to_string()),
        ("ingredients", or_none(&c.ingredients)),
        ("tags", or_none(&c.tags)),
        ("evidence", evidence),
    ])
}

fn candidate_list(candidates: &[Candidate]) -> String {
    candidates
        .iter()
        .map(|c| {
            format!(
                "- {} ({} minutes): {} Ingredients: {}.",
                c.name,
                c.prep_time_minutes,
                c.description.trim(),
                or_none(&c.ingredients)
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Assembles the sections for `mode`. Appraisal mode needs a plan;
/// baseline mode needs the context and the raw candidate list.
pub fn build_prompt(
    payload: PromptPayload<'_>,
    mode: PromptMode,
    templates: &PromptTemplates,
) -> Result<PromptBundle> {
    let (keys, values): (&[&str], BTreeMap<&str, String>) = match (payload, mode) {
        (PromptPayload::Plan { plan, context }, PromptMode::Appraisal) => {
            let mut values = context_values(context);
            values.extend(plan_values(plan));
            (&APPRAISAL_SECTIONS, values)
        }
        (PromptPayload::Context { context, candidates }, PromptMode::Baseline) => {
            if candidates.is_empty() {
                return Err(Error::InvalidPromptRequest(
                    "baseline prompt needs at least one candidate".into(),
                ));
            }
            let mut values = context_values(context);
            values.insert("candidate_list", candidate_list(candidates));
            (&BASELINE_SECTIONS, values)
        }
        (PromptPayload::Plan { .. }, PromptMode::Baseline) => {
            return Err(Error::InvalidPromptRequest(
                "baseline prompts are built from the context and candidate list, not a plan".into(),
            ))
        }
        (PromptPayload::Context { .. }, PromptMode::Appraisal) => {
            return Err(Error::InvalidPromptRequest(
                "appraisal prompts require an explanation plan".into(),
            ))
        }
    };
    let sections = keys
        .iter()
        .map(|key| templates.render(key, &values))
        .collect::<Result<Vec<_>>>()?;
    Ok(PromptBundle {
        system_instruction: templates.system.clone(),
        sections,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fill_replaces_known_and_keeps_other_braces() {
        let values = BTreeMap::from([("name", "Ana".to_string())]);
        assert_eq!(fill("hi {name} {} {Not} {", &values).unwrap(), "hi Ana {} {Not} {");
        assert!(matches!(fill("{missing}", &values), Err(Error::Template(_))));
    }

    #[test]
    fn template_file_must_define_all_sections() {
        let text = "system = \"s\"\n[[sections]]\nkey = \"profile\"\nlabel = \"P\"\nbody = \"x\"\n";
        assert!(matches!(PromptTemplates::parse(text), Err(Error::Template(_))));
        assert_eq!(PromptTemplates::bundled().sections.len(), 7);
    }
}
