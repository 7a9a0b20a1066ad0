//! Bundled case-study scenarios. All fixture data is simulated; each
//! fixture's `notes` separates stated inputs from authored filler.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use appraisal_core::{Candidate, DimensionId, Query, UserProfile};

const FIXTURES: [(&str, &str); 2] = [
    ("alex", include_str!("../data/fixtures/alex.json")),
    ("sarah", include_str!("../data/fixtures/sarah.json")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ScenarioFixture {
    pub name: String,
    pub notes: String,
    pub profile: UserProfile,
    pub query: Query,
    pub candidates: Vec<Candidate>,
    pub expected_dominant: Vec<DimensionId>,
}

pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|(name, _)| *name).collect()
}

pub fn load_fixture(name: &str) -> Option<ScenarioFixture> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| serde_json::from_str(text).expect("bundled fixture parses"))
}
