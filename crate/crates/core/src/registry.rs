//! CoreGRID appraisal items grouped into six appraisal dimensions.
//!
//! The bundled catalog ships twenty verbatim item statements. A registry
//! document may extend it with further items and may override a
//! dimension's display name or canonical statement; it can never redefine
//! a bundled item.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_REGISTRY: &str = include_str!("../data/registry.json");

/// The closed set of appraisal dimensions. Declaration order is the
/// canonical order used for every tie-break in the engine.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, JsonSchema,
)]
pub enum DimensionId {
    PredictabilitySurprise,
    GoalRelevance,
    Valence,
    Urgency,
    Agency,
    NormativeSignificance,
}

impl DimensionId {
    pub const ALL: [DimensionId; 6] = [
        DimensionId::PredictabilitySurprise,
        DimensionId::GoalRelevance,
        DimensionId::Valence,
        DimensionId::Urgency,
        DimensionId::Agency,
        DimensionId::NormativeSignificance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DimensionId::PredictabilitySurprise => "PredictabilitySurprise",
            DimensionId::GoalRelevance => "GoalRelevance",
            DimensionId::Valence => "Valence",
            DimensionId::Urgency => "Urgency",
            DimensionId::Agency => "Agency",
            DimensionId::NormativeSignificance => "NormativeSignificance",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for DimensionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DimensionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DimensionId::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::UnknownDimension(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct AppraisalDimension {
    pub id: DimensionId,
    pub display_name: String,
    /// Hypothesis sentence used by entailment scoring.
    pub canonical_statement: String,
}

/// Whether affirming an item raises (`direct`) or lowers (`inverse`) its
/// dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Coding {
    Direct,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct AppraisalItem {
    pub id: String,
    pub statement: String,
    pub dimension: DimensionId,
    pub coding: Coding,
    /// Sub-grouping inside a dimension, e.g. `causation` within Agency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, JsonSchema)]
pub struct Registry {
    dimensions: Vec<AppraisalDimension>,
    items: Vec<AppraisalItem>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    extensions: Vec<AppraisalItem>,
}

// Wire shapes keep dimension ids as strings so an unknown id surfaces as
// `UnknownDimension` rather than a generic JSON error.
#[derive(Deserialize)]
struct RegistryDoc {
    #[serde(default)]
    dimensions: Vec<DimensionDoc>,
    #[serde(default)]
    items: Vec<ItemDoc>,
    #[serde(default)]
    extensions: Vec<ItemDoc>,
}

#[derive(Deserialize)]
struct DimensionDoc {
    id: String,
    display_name: Option<String>,
    canonical_statement: Option<String>,
}

#[derive(Deserialize)]
struct ItemDoc {
    id: String,
    statement: String,
    dimension: String,
    coding: Coding,
    #[serde(default)]
    tag: Option<String>,
}

impl ItemDoc {
    fn into_item(self) -> Result<AppraisalItem> {
        Ok(AppraisalItem {
            dimension: self.dimension.parse()?,
            id: self.id,
            statement: self.statement,
            coding: self.coding,
            tag: self.tag,
        })
    }
}

fn catalog_order(items: &mut [AppraisalItem]) {
    items.sort_by(|a, b| a.dimension.cmp(&b.dimension).then_with(|| a.id.cmp(&b.id)));
}

/// Loads the bundled catalog, merged with `source` when given.
///
/// Items in `source` (under `items` or `extensions`) become extensions;
/// dimension entries override the bundled display name and canonical
/// statement field by field.
pub fn load_registry(source: Option<&str>) -> Result<Registry> {
    let mut registry = Registry::bundled();
    let Some(source) = source else {
        return Ok(registry);
    };
    let doc: RegistryDoc = serde_json::from_str(source)?;

    for dim in doc.dimensions {
        let id: DimensionId = dim.id.parse()?;
        let slot = &mut registry.dimensions[id.index()];
        if let Some(name) = dim.display_name {
            slot.display_name = name;
        }
        if let Some(statement) = dim.canonical_statement {
            if statement.trim().is_empty() {
                return Err(Error::EmptyCanonicalStatement(id));
            }
            slot.canonical_statement = statement;
        }
    }

    let mut seen: BTreeSet<String> = registry.items.iter().map(|i| i.id.clone()).collect();
    for item in doc.items.into_iter().chain(doc.extensions) {
        let item = item.into_item()?;
        if !seen.insert(item.id.clone()) {
            return Err(Error::DuplicateItem(item.id));
        }
        registry.extensions.push(item);
    }
    catalog_order(&mut registry.extensions);
    Ok(registry)
}

impl Registry {
    /// The bundled twenty-item catalog.
    pub fn bundled() -> Registry {
        Registry::from_json(BUNDLED_REGISTRY).expect("bundled registry is valid")
    }

    /// Parses a complete registry document (the inverse of serialization).
    pub fn from_json(text: &str) -> Result<Registry> {
        let doc: RegistryDoc = serde_json::from_str(text)?;

        let mut dimensions: Vec<Option<AppraisalDimension>> = vec![None; 6];
        for dim in doc.dimensions {
            let id: DimensionId = dim.id.parse()?;
            let canonical_statement = dim.canonical_statement.unwrap_or_default();
            if canonical_statement.trim().is_empty() {
                return Err(Error::EmptyCanonicalStatement(id));
            }
            dimensions[id.index()] = Some(AppraisalDimension {
                id,
                display_name: dim.display_name.unwrap_or_else(|| id.to_string()),
                canonical_statement,
            });
        }
        let dimensions = dimensions
            .into_iter()
            .zip(DimensionId::ALL)
            .map(|(d, id)| d.ok_or(Error::MissingDimension(id)))
            .collect::<Result<Vec<_>>>()?;

        let mut seen = BTreeSet::new();
        let mut convert = |docs: Vec<ItemDoc>| -> Result<Vec<AppraisalItem>> {
            let mut items = docs
                .into_iter()
                .map(ItemDoc::into_item)
                .collect::<Result<Vec<_>>>()?;
            for item in &items {
                if !seen.insert(item.id.clone()) {
                    return Err(Error::DuplicateItem(item.id.clone()));
                }
            }
            catalog_order(&mut items);
            Ok(items)
        };
        let items = convert(doc.items)?;
        let extensions = convert(doc.extensions)?;

        Ok(Registry {
            dimensions,
            items,
            extensions,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }

    pub fn dimensions(&self) -> &[AppraisalDimension] {
        &self.dimensions
    }

    pub fn dimension(&self, id: DimensionId) -> &AppraisalDimension {
        &self.dimensions[id.index()]
    }

    pub fn display_name(&self, id: DimensionId) -> &str {
        &self.dimension(id).display_name
    }

    /// Bundled items only; see [`Registry::all_items`].
    pub fn items(&self) -> &[AppraisalItem] {
        &self.items
    }

    pub fn extensions(&self) -> &[AppraisalItem] {
        &self.extensions
    }

    pub fn all_items(&self) -> impl Iterator<Item = &AppraisalItem> {
        self.items.iter().chain(&self.extensions)
    }

    pub fn len(&self) -> usize {
        self.items.len() + self.extensions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Items of one dimension in catalog order (bundled first, then
    /// extensions, each sorted by id).
    pub fn items_of(&self, dim: DimensionId) -> Vec<&AppraisalItem> {
        self.all_items().filter(|i| i.dimension == dim).collect()
    }
}
