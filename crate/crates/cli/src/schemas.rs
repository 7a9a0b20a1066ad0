use std::collections::BTreeMap;

use schemars::{schema_for, Schema};

use appraisal_core::explanation::RunRecord;
use appraisal_core::{Candidate, RankedList, SalienceProfile, UserProfile};

use crate::commands::{ExplainReport, RankReport, SalienceReport, ScenarioReport};
use crate::config::ConfigFile;
use crate::fixtures::ScenarioFixture;

/// JSON schemas of every document the CLI reads or writes, by name.
pub fn all_schemas() -> BTreeMap<&'static str, Schema> {
    BTreeMap::from([
        ("config", schema_for!(ConfigFile)),
        ("profile", schema_for!(UserProfile)),
        ("candidates", schema_for!(Vec<Candidate>)),
        ("fixture", schema_for!(ScenarioFixture)),
        ("salience", schema_for!(SalienceProfile)),
        ("ranking", schema_for!(RankedList)),
        ("salience_report", schema_for!(SalienceReport)),
        ("rank_report", schema_for!(RankReport)),
        ("explain_report", schema_for!(ExplainReport)),
        ("scenario_report", schema_for!(ScenarioReport)),
        ("run_record", schema_for!(RunRecord)),
    ])
}
