//! Keyword lexicons: per-dimension cue words, a sentiment word list and
//! the forbidden-ingredient table behind each dietary constraint tag.

use std::collections::{BTreeMap, BTreeSet};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::registry::DimensionId;
use crate::text::normalize_keyword;

const BUNDLED_LEXICONS: &str = include_str!("../data/lexicons.json");

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
pub struct SentimentLexicon {
    pub positive: BTreeSet<String>,
    pub negative: BTreeSet<String>,
}

/// Dimension word lists must be pairwise disjoint so a single cue word can
/// only ever move one dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Lexicons {
    pub dimensions: BTreeMap<DimensionId, BTreeSet<String>>,
    pub sentiment: SentimentLexicon,
    /// Constraint tag → ingredient tokens that violate it.
    pub constraints: BTreeMap<String, BTreeSet<String>>,
}

/// Partial lexicon document used to override the bundled lists. Every
/// present list replaces its bundled counterpart wholesale.
#[derive(Debug, Default, Deserialize, JsonSchema)]
pub struct LexiconOverrides {
    #[serde(default)]
    pub dimensions: BTreeMap<DimensionId, BTreeSet<String>>,
    #[serde(default)]
    pub sentiment: Option<SentimentOverrides>,
    #[serde(default)]
    pub constraints: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Default, Deserialize, JsonSchema)]
pub struct SentimentOverrides {
    pub positive: Option<BTreeSet<String>>,
    pub negative: Option<BTreeSet<String>>,
}

fn normalized(words: BTreeSet<String>) -> BTreeSet<String> {
    words
        .iter()
        .map(|w| normalize_keyword(w))
        .filter(|w| !w.is_empty())
        .collect()
}

impl Lexicons {
    pub fn bundled() -> Lexicons {
        let lex: Lexicons = serde_json::from_str(BUNDLED_LEXICONS).expect("bundled lexicons parse");
        lex.validated().expect("bundled lexicons are disjoint")
    }

    /// Bundled lexicons with `overrides` (a lexicon JSON document) applied.
    pub fn load(overrides: Option<&str>) -> Result<Lexicons> {
        let mut lex = Lexicons::bundled();
        if let Some(text) = overrides {
            let doc: LexiconOverrides = serde_json::from_str(text)?;
            lex.apply(doc);
        }
        lex.validated()
    }

    fn apply(&mut self, doc: LexiconOverrides) {
        for (dim, words) in doc.dimensions {
            self.dimensions.insert(dim, words);
        }
        if let Some(sentiment) = doc.sentiment {
            if let Some(p) = sentiment.positive {
                self.sentiment.positive = p;
            }
            if let Some(n) = sentiment.negative {
                self.sentiment.negative = n;
            }
        }
        for (tag, words) in doc.constraints {
            self.constraints.insert(normalize_keyword(&tag), words);
        }
    }

    fn validated(mut self) -> Result<Lexicons> {
        for dim in DimensionId::ALL {
            let words = self.dimensions.remove(&dim).unwrap_or_default();
            self.dimensions.insert(dim, normalized(words));
        }
        self.sentiment.positive = normalized(std::mem::take(&mut self.sentiment.positive));
        self.sentiment.negative = normalized(std::mem::take(&mut self.sentiment.negative));
        for words in self.constraints.values_mut() {
            *words = normalized(std::mem::take(words));
        }

        let mut owner: BTreeMap<&str, DimensionId> = BTreeMap::new();
        for (dim, words) in &self.dimensions {
            for w in words {
                if let Some(first) = owner.insert(w, *dim) {
                    return Err(Error::LexiconOverlap {
                        word: w.clone(),
                        first,
                        second: *dim,
                    });
                }
            }
        }
        Ok(self)
    }

    pub fn words(&self, dim: DimensionId) -> &BTreeSet<String> {
        &self.dimensions[&dim]
    }

    pub fn is_cue(&self, dim: DimensionId, token: &str) -> bool {
        self.words(dim).contains(token)
    }

    /// The dimension whose lexicon lists `token`, if any.
    pub fn dimension_of(&self, token: &str) -> Option<DimensionId> {
        DimensionId::ALL.into_iter().find(|d| self.is_cue(*d, token))
    }

    pub fn forbidden_for(&self, constraint: &str) -> Option<&BTreeSet<String>> {
        self.constraints.get(constraint)
    }
}
