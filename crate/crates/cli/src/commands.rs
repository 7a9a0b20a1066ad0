use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use appraisal_core::explanation::{
    build_prompt, compare, realize_appraisal, realize_baseline, ComparisonReport, ExplanationPlan,
    PromptMode, PromptPayload, Realizer, RunLog,
};
use appraisal_core::{
    Candidate, DimensionId, Engine, Error as CoreError, PipelineRun, RankOptions, RankedList,
    SalienceProfile, SalienceScorer, UnifiedContext,
};

use crate::args::{Command, GlobalOpts, OutputFormat, RealizerKind, ScorerKind};
use crate::config::{Inputs, RunConfig};
use crate::error::{CliError, CliResult};
use crate::fixtures::{fixture_names, load_fixture};
use crate::schemas::all_schemas;

/// Default artifact directory for `scenario` without `--out`.
pub const DEFAULT_SCENARIO_DIR: &str = "appraisal-runs";
pub const RUN_LOG_FILE: &str = "runlog.jsonl";

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
pub struct SalienceReport {
    pub context: UnifiedContext,
    pub salience: SalienceProfile,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
pub struct RankReport {
    pub salience: SalienceProfile,
    pub ranking: RankedList,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
pub struct ExplainReport {
    pub candidate_id: String,
    pub salience: SalienceProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub appraisal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<String>,
    /// Some explanation came from the template because the chat endpoint
    /// was unreachable.
    pub fallback: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonReport>,
    /// Section labels of the baseline prompt (only with `--compare`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub baseline_prompt_sections: Vec<String>,
    pub plan: ExplanationPlan,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
pub struct ScenarioReport {
    pub name: String,
    pub passed: bool,
    pub expected_dominant: Vec<DimensionId>,
    pub observed_dominant: Vec<DimensionId>,
    pub top_candidate: String,
    pub failures: Vec<String>,
    pub artifacts: PathBuf,
}

struct Session {
    config: RunConfig,
    engine: Engine,
}

impl Session {
    fn new(config: RunConfig) -> CliResult<Session> {
        let engine = config.engine()?;
        Ok(Session { config, engine })
    }

    fn remote(&self) -> Option<&dyn SalienceScorer> {
        match self.config.scorer {
            ScorerKind::Lexical => None,
            ScorerKind::Remote => Some(&self.config.nli),
        }
    }

    fn realizer(&self) -> Realizer {
        match self.config.realizer {
            RealizerKind::Template => Realizer::Template,
            RealizerKind::Llm => Realizer::Llm(self.config.llm.clone()),
        }
    }

    fn options(&self) -> RankOptions {
        RankOptions {
            filter_normative: self.config.filter_normative,
            ..RankOptions::default()
        }
    }

    fn salience(&self, inputs: &Inputs) -> CliResult<SalienceReport> {
        let context = self.engine.context(&inputs.profile, &inputs.query)?;
        let salience =
            self.engine
                .salience(&context, self.remote(), self.config.fallback, self.config.selection)?;
        Ok(SalienceReport { context, salience })
    }

    fn run(&self, inputs: &Inputs) -> CliResult<PipelineRun> {
        Ok(self.engine.run(
            &inputs.profile,
            &inputs.query,
            &inputs.candidates,
            self.remote(),
            self.config.fallback,
            self.config.selection,
            self.options(),
        )?)
    }

    fn explain(&self, inputs: &Inputs, log: &mut RunLog) -> CliResult<ExplainReport> {
        let run = self.run(inputs)?;
        let plan = run.plan.ok_or(CoreError::NothingToExplain)?;
        // The baseline draws from the same eligible pool as the ranking.
        let pool: Vec<Candidate> = inputs
            .candidates
            .iter()
            .filter(|c| run.ranked.position(&c.id).is_some())
            .cloned()
            .collect();
        let realizer = self.realizer();
        let templates = &self.engine.templates;
        let fallback = self.config.fallback;
        let want_appraisal = self.config.compare || !self.config.baseline;
        let want_baseline = self.config.compare || self.config.baseline;

        let appraisal = want_appraisal
            .then(|| realize_appraisal(&plan, &run.context, &realizer, templates, fallback, log))
            .transpose()?;
        let baseline = want_baseline
            .then(|| realize_baseline(&run.context, &pool, &realizer, templates, fallback, log))
            .transpose()?;

        let mut report = ExplainReport {
            candidate_id: plan.candidate.id.clone(),
            salience: run.salience,
            fallback: appraisal.iter().chain(baseline.iter()).any(|r| r.fallback),
            appraisal: appraisal.map(|r| r.text),
            baseline: baseline.map(|r| r.text),
            comparison: None,
            baseline_prompt_sections: Vec::new(),
            plan,
        };
        if self.config.compare {
            let (a, b) = (report.appraisal.as_deref(), report.baseline.as_deref());
            report.comparison = Some(compare(a.unwrap_or(""), b.unwrap_or(""), &report.plan));
            let bundle = build_prompt(
                PromptPayload::Context {
                    context: &run.context,
                    candidates: &pool,
                },
                PromptMode::Baseline,
                templates,
            )?;
            report.baseline_prompt_sections = bundle.sections.into_iter().map(|s| s.label).collect();
        }
        Ok(report)
    }

    fn write_log(&self, log: &RunLog) -> CliResult<()> {
        if let Some(dir) = &self.config.out {
            fs::create_dir_all(dir)?;
            log.append_to(&dir.join(RUN_LOG_FILE))?;
        }
        Ok(())
    }
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    writeln!(out, "{text}")?;
    Ok(())
}

fn dim_names(engine: &Engine, dims: &[DimensionId]) -> String {
    dims.iter()
        .map(|d| engine.registry.display_name(*d).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn print_salience(out: &mut dyn Write, engine: &Engine, s: &SalienceProfile) -> CliResult<()> {
    writeln!(out, "scorer: {}", s.scorer_id)?;
    for dim in DimensionId::ALL {
        writeln!(out, "  {:<28} {:.3}", engine.registry.display_name(dim), s.weight(dim))?;
    }
    writeln!(out, "dominant: {}", dim_names(engine, &s.dominant))?;
    Ok(())
}

fn print_ranking(out: &mut dyn Write, ranked: &RankedList) -> CliResult<()> {
    for (i, e) in ranked.entries.iter().enumerate() {
        writeln!(out, "{:>2}. {:<28} {:.3}", i + 1, e.candidate_id, e.composite)?;
    }
    for x in &ranked.excluded {
        writeln!(out, "excluded: {} ({})", x.candidate_id, x.reason)?;
    }
    Ok(())
}

fn print_explain(out: &mut dyn Write, report: &ExplainReport, compare_mode: bool) -> CliResult<()> {
    if !compare_mode {
        let text = report.appraisal.as_deref().or(report.baseline.as_deref()).unwrap_or("");
        write!(out, "{text}")?;
        if !text.ends_with('\n') {
            writeln!(out)?;
        }
        return Ok(());
    }
    writeln!(out, "== Appraisal explanation ==")?;
    writeln!(out, "{}", report.appraisal.as_deref().unwrap_or("").trim_end())?;
    writeln!(out, "\n== Baseline explanation ==")?;
    writeln!(out, "{}", report.baseline.as_deref().unwrap_or("").trim_end())?;
    if let Some(c) = &report.comparison {
        writeln!(out, "\n== Comparison ==")?;
        for (label, m) in [("appraisal", &c.appraisal), ("baseline", &c.baseline)] {
            writeln!(
                out,
                "{label}: names {}/{} dominant appraisals, cites {} evidence strings, {} words",
                m.dimensions_named.len(),
                c.dominant.len(),
                m.evidence_cited.len(),
                m.words
            )?;
        }
    }
    writeln!(out, "baseline prompt sections: {}", report.baseline_prompt_sections.join(", "))?;
    Ok(())
}

fn write_artifact<T: Serialize>(dir: &Path, file: &str, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("artifact serializes");
    fs::write(dir.join(file), text + "\n")?;
    Ok(())
}

fn scenario(opts: &GlobalOpts, name: &str, env: &dyn Fn(&str) -> Option<String>) -> CliResult<ScenarioReport> {
    let Some(fixture) = load_fixture(name) else {
        return Err(CliError::Input(format!(
            "unknown scenario `{name}`; available: {}",
            fixture_names().join(", ")
        )));
    };
    let mut config = RunConfig::resolve(opts, env)?;
    config.fixture = Some(name.to_string());
    config.compare = true;
    let root = config.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_SCENARIO_DIR));
    let dir = root.join(name);
    fs::create_dir_all(&dir)?;
    config.out = Some(dir.clone());
    let session = Session::new(config)?;
    let inputs = session.config.inputs(true)?;

    let run = session.run(&inputs)?;
    let mut log = RunLog::default();
    let report = session.explain(&inputs, &mut log)?;

    write_artifact(&dir, "salience.json", &run.salience)?;
    write_artifact(&dir, "ranking.json", &run.ranked)?;
    write_artifact(&dir, "plan.json", &report.plan)?;
    fs::write(dir.join("explanation.txt"), report.appraisal.as_deref().unwrap_or(""))?;
    fs::write(dir.join("baseline.txt"), report.baseline.as_deref().unwrap_or(""))?;
    write_artifact(&dir, "comparison.json", &report.comparison)?;
    // Overwrite rather than append so reruns stay comparable.
    fs::write(dir.join(RUN_LOG_FILE), log.to_jsonl())?;

    let mut failures = Vec::new();
    if run.salience.dominant != fixture.expected_dominant {
        failures.push(format!(
            "dominant {:?}, expected {:?}",
            run.salience.dominant, fixture.expected_dominant
        ));
    }
    if !report.plan.meets_constraints() {
        failures.push(format!("{} violates a dietary constraint", report.plan.candidate.id));
    }
    if report.appraisal.as_deref().is_none_or(|t| t.trim().is_empty()) {
        failures.push("empty appraisal explanation".into());
    }
    Ok(ScenarioReport {
        name: name.to_string(),
        passed: failures.is_empty(),
        expected_dominant: fixture.expected_dominant,
        observed_dominant: run.salience.dominant,
        top_candidate: report.candidate_id,
        failures,
        artifacts: dir,
    })
}

/// Runs one parsed command line, writing the result to `out`.
pub fn execute(
    command: &Command,
    opts: &GlobalOpts,
    env: &dyn Fn(&str) -> Option<String>,
    out: &mut dyn Write,
) -> CliResult<()> {
    match command {
        Command::Schemas => json_line(out, &all_schemas()),
        Command::Scenario { name } => {
            let report = scenario(opts, name, env)?;
            match opts.format.unwrap_or(OutputFormat::Text) {
                OutputFormat::Json => json_line(out, &report)?,
                OutputFormat::Text => {
                    let status = if report.passed { "PASS" } else { "FAIL" };
                    writeln!(out, "{status} {} (top: {})", report.name, report.top_candidate)?;
                    for f in &report.failures {
                        writeln!(out, "  {f}")?;
                    }
                    writeln!(out, "artifacts: {}", report.artifacts.display())?;
                }
            }
            if report.passed {
                Ok(())
            } else {
                Err(CliError::ScenarioFailed {
                    name: report.name,
                    detail: report.failures.join("; "),
                })
            }
        }
        Command::Salience => {
            let session = Session::new(RunConfig::resolve(opts, env)?)?;
            let inputs = session.config.inputs(false)?;
            let report = session.salience(&inputs)?;
            match session.config.format {
                OutputFormat::Json => json_line(out, &report),
                OutputFormat::Text => print_salience(out, &session.engine, &report.salience),
            }
        }
        Command::Rank => {
            let session = Session::new(RunConfig::resolve(opts, env)?)?;
            let inputs = session.config.inputs(true)?;
            let run = session.run(&inputs)?;
            let report = RankReport {
                salience: run.salience,
                ranking: run.ranked,
            };
            match session.config.format {
                OutputFormat::Json => json_line(out, &report),
                OutputFormat::Text => {
                    print_salience(out, &session.engine, &report.salience)?;
                    print_ranking(out, &report.ranking)
                }
            }
        }
        Command::Explain => {
            let session = Session::new(RunConfig::resolve(opts, env)?)?;
            let inputs = session.config.inputs(true)?;
            let mut log = RunLog::default();
            let result = session.explain(&inputs, &mut log);
            // Failed chat calls are logged too.
            session.write_log(&log)?;
            let report = result?;
            match session.config.format {
                OutputFormat::Json => json_line(out, &report),
                OutputFormat::Text => print_explain(out, &report, session.config.compare),
            }
        }
    }
}
