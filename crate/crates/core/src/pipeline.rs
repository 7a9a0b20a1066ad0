//! The whole engine behind one value: context → salience → ranking →
//! plan.

use crate::context::{build_unified_context, Query, UnifiedContext, UserProfile};
use crate::error::Result;
use crate::explanation::{build_plan, ExplanationPlan, PromptTemplates};
use crate::lexicon::Lexicons;
use crate::registry::Registry;
use crate::salience::{assess_salience, LexicalScorer, SalienceProfile, SalienceScorer, Selection};
use crate::scoring::{rank_candidates, Candidate, RankOptions, RankedList, ScoringConstants};

#[derive(Debug, Clone)]
pub struct Engine {
    pub registry: Registry,
    pub lexicons: Lexicons,
    pub constants: ScoringConstants,
    pub lexical: LexicalScorer,
    pub templates: PromptTemplates,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            registry: Registry::bundled(),
            lexicons: Lexicons::bundled(),
            constants: ScoringConstants::default(),
            lexical: LexicalScorer::default(),
            templates: PromptTemplates::bundled(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub context: UnifiedContext,
    pub salience: SalienceProfile,
    pub ranked: RankedList,
    /// `None` when every candidate was excluded.
    pub plan: Option<ExplanationPlan>,
}

impl Engine {
    pub fn context(&self, profile: &UserProfile, query: &Query) -> Result<UnifiedContext> {
        build_unified_context(profile, query, &self.lexicons)
    }

    /// Salience with the lexical scorer, or with `remote` (falling back to
    /// lexical when `fallback` is set and the remote is unreachable).
    pub fn salience(
        &self,
        context: &UnifiedContext,
        remote: Option<&dyn SalienceScorer>,
        fallback: bool,
        selection: Selection,
    ) -> Result<SalienceProfile> {
        match remote {
            None => assess_salience(context, &self.registry, &self.lexical, None, selection),
            Some(scorer) => assess_salience(
                context,
                &self.registry,
                scorer,
                fallback.then_some(&self.lexical),
                selection,
            ),
        }
    }

    pub fn rank(
        &self,
        candidates: &[Candidate],
        context: &UnifiedContext,
        salience: &SalienceProfile,
        options: RankOptions,
    ) -> Result<RankedList> {
        rank_candidates(candidates, context, salience, &self.lexicons, &self.constants, options)
    }

    pub fn run(
        &self,
        profile: &UserProfile,
        query: &Query,
        candidates: &[Candidate],
        remote: Option<&dyn SalienceScorer>,
        fallback: bool,
        selection: Selection,
        options: RankOptions,
    ) -> Result<PipelineRun> {
        let context = self.context(profile, query)?;
        let salience = self.salience(&context, remote, fallback, selection)?;
        let ranked = self.rank(candidates, &context, &salience, options)?;
        let plan = if ranked.entries.is_empty() {
            None
        } else {
            Some(build_plan(&ranked, &salience, &context, candidates, &self.registry)?)
        };
        Ok(PipelineRun {
            context,
            salience,
            ranked,
            plan,
        })
    }
}
