//! Unified user context: long-term profile plus the signals parsed out of
//! the current query (dimension keywords, sentiment, time constraint).

use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{Lexicons, SentimentLexicon};
use crate::registry::DimensionId;
use crate::text::{normalize_keyword, tokenize};

const MAX_MINUTES: u32 = 24 * 60;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
pub struct UserProfile {
    pub user_id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub goals: Vec<String>,
    #[serde(default)]
    pub preference_keywords: Vec<String>,
    /// Hard constraints, e.g. `vegetarian`, `nut_free`.
    #[serde(default)]
    pub dietary_constraints: Vec<String>,
    /// Ingredients and tags seen in the user's history.
    #[serde(default)]
    pub familiar_items: Vec<String>,
    #[serde(default)]
    pub history_queries: Vec<String>,
}

fn normalize_list(words: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(words.len());
    for w in words.iter().map(|w| normalize_keyword(w)) {
        if !w.is_empty() && !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

impl UserProfile {
    /// Lowercased, trimmed and deduplicated keyword lists (first occurrence
    /// order preserved).
    pub fn normalized(&self) -> UserProfile {
        UserProfile {
            user_id: self.user_id.clone(),
            description: self.description.clone(),
            goals: normalize_list(&self.goals),
            preference_keywords: normalize_list(&self.preference_keywords),
            dietary_constraints: normalize_list(&self.dietary_constraints),
            familiar_items: normalize_list(&self.familiar_items),
            history_queries: self.history_queries.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Query {
    pub text: String,
    /// ISO-8601, informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Query {
    pub fn new(text: impl Into<String>) -> Query {
        Query {
            text: text.into(),
            timestamp: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
pub struct SentimentTally {
    pub positive_hits: usize,
    pub negative_hits: usize,
    pub positive_words: Vec<String>,
    pub negative_words: Vec<String>,
}

impl SentimentTally {
    pub fn total(&self) -> usize {
        self.positive_hits + self.negative_hits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum HitSource {
    Query,
    Profile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct KeywordHit {
    pub keyword: String,
    pub source: HitSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct UnifiedContext {
    pub profile: UserProfile,
    pub query: Query,
    /// Premise text for entailment scoring.
    pub composite_text: String,
    pub time_constraint_minutes: Option<u32>,
    pub sentiment: SentimentTally,
    pub keyword_hits: BTreeMap<DimensionId, Vec<KeywordHit>>,
}

impl UnifiedContext {
    pub fn hits(&self, dim: DimensionId) -> &[KeywordHit] {
        self.keyword_hits.get(&dim).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn hit_count(&self, dim: DimensionId, source: HitSource) -> usize {
        self.hits(dim).iter().filter(|h| h.source == source).count()
    }

    /// Query-source keywords across all dimensions, in dimension order.
    pub fn query_cues(&self) -> Vec<&str> {
        self.keyword_hits
            .values()
            .flatten()
            .filter(|h| h.source == HitSource::Query)
            .map(|h| h.keyword.as_str())
            .collect()
    }
}

fn duration_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| {
        Regex::new(r"(?i)\b(?:(half an hour)|(an hour)|(\d+)\s*-?\s*(?:minutes?|mins?))\b")
            .expect("duration regex compiles")
    })
}

/// First duration in `text`, in minutes.
///
/// Recognizes `<N> minutes`, `<N> min(s)`, `<N>-minute`, `half an hour`
/// and `an hour`. Counts outside `1..=1440` are skipped and scanning
/// continues past them.
pub fn parse_time_constraint(text: &str) -> Option<u32> {
    duration_pattern().captures_iter(text).find_map(|caps| {
        if caps.get(1).is_some() {
            Some(30)
        } else if caps.get(2).is_some() {
            Some(60)
        } else {
            caps.get(3)?
                .as_str()
                .parse::<u32>()
                .ok()
                .filter(|n| (1..=MAX_MINUTES).contains(n))
        }
    })
}

/// Whole-word, case-insensitive sentiment count; every occurrence counts.
pub fn tally_sentiment(text: &str, lexicon: &SentimentLexicon) -> SentimentTally {
    let mut tally = SentimentTally::default();
    for token in tokenize(text) {
        if lexicon.positive.contains(&token) {
            tally.positive_words.push(token);
        } else if lexicon.negative.contains(&token) {
            tally.negative_words.push(token);
        }
    }
    tally.positive_hits = tally.positive_words.len();
    tally.negative_hits = tally.negative_words.len();
    tally
}

fn composite_text(profile: &UserProfile, query: &Query) -> String {
    let mut parts = Vec::new();
    let description = profile.description.trim();
    if !description.is_empty() {
        parts.push(description.to_string());
    }
    if !profile.goals.is_empty() {
        parts.push(format!("Goals: {}.", profile.goals.join(", ")));
    }
    parts.push(query.text.trim().to_string());
    parts.join(" ")
}

/// Merges profile and query into the context the salience and scoring
/// stages consume.
///
/// Query tokens are matched against each dimension lexicon as `query`
/// hits; the profile's goals and preference keywords are matched as
/// `profile` hits. Hits are deduplicated within each source.
pub fn build_unified_context(
    profile: &UserProfile,
    query: &Query,
    lexicons: &Lexicons,
) -> Result<UnifiedContext> {
    if query.text.trim().is_empty() {
        return Err(Error::EmptyQuery);
    }
    let profile = profile.normalized();

    let mut keyword_hits: BTreeMap<DimensionId, Vec<KeywordHit>> =
        DimensionId::ALL.iter().map(|d| (*d, Vec::new())).collect();
    let mut record = |token: String, source: HitSource| {
        if let Some(dim) = lexicons.dimension_of(&token) {
            let hits = keyword_hits.get_mut(&dim).expect("all dimensions present");
            if !hits.iter().any(|h| h.source == source && h.keyword == token) {
                hits.push(KeywordHit {
                    keyword: token,
                    source,
                });
            }
        }
    };
    for token in tokenize(&query.text) {
        record(token, HitSource::Query);
    }
    for keyword in profile.goals.iter().chain(&profile.preference_keywords) {
        for token in tokenize(keyword) {
            record(token, HitSource::Profile);
        }
    }

    Ok(UnifiedContext {
        composite_text: composite_text(&profile, query),
        time_constraint_minutes: parse_time_constraint(&query.text),
        sentiment: tally_sentiment(&query.text, &lexicons.sentiment),
        keyword_hits,
        query: query.clone(),
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keywords(ctx: &UnifiedContext, dim: DimensionId) -> Vec<&str> {
        ctx.hits(dim).iter().map(|h| h.keyword.as_str()).collect()
    }

    // Independent scanner over the documented duration grammar.
    fn oracle_minutes(text: &str) -> Option<u32> {
        let lower = text.to_lowercase();
        let bytes = lower.as_bytes();
        let boundary = |i: usize| i == 0 || !bytes[i - 1].is_ascii_alphanumeric();
        let end_ok = |i: usize| i >= bytes.len() || !bytes[i].is_ascii_alphanumeric();
        for i in 0..bytes.len() {
            if !boundary(i) {
                continue;
            }
            let rest = &lower[i..];
            if rest.starts_with("half an hour") && end_ok(i + 12) {
                return Some(30);
            }
            if rest.starts_with("an hour") && end_ok(i + 7) {
                return Some(60);
            }
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            if digits.is_empty() {
                continue;
            }
            let mut j = i + digits.len();
            while j < bytes.len() && bytes[j] == b' ' {
                j += 1;
            }
            if j < bytes.len() && bytes[j] == b'-' {
                j += 1;
            }
            while j < bytes.len() && bytes[j] == b' ' {
                j += 1;
            }
            for unit in ["minutes", "minute", "mins", "min"] {
                if lower[j..].starts_with(unit) && end_ok(j + unit.len()) {
                    if let Ok(n) = digits.parse::<u32>() {
                        if (1..=MAX_MINUTES).contains(&n) {
                            return Some(n);
                        }
                    }
                    break;
                }
            }
        }
        None
    }

    #[test]
    fn fifteen_minutes() {
        assert_eq!(
            parse_time_constraint("can you make something in 15 minutes?"),
            Some(15)
        );
    }

    #[test]
    fn no_duration() {
        assert_eq!(parse_time_constraint("surprise me tonight"), None);
    }

    #[test]
    fn first_match_wins() {
        let text = "a 20-minute meal, max 30 minutes";
        assert_eq!(oracle_minutes(text), Some(20));
        assert_eq!(parse_time_constraint(text), Some(20));
    }

    #[test]
    fn hour_phrases_and_abbreviations() {
        for (text, expected) in [
            ("Half an hour tops", Some(30)),
            ("give me an hour", Some(60)),
            ("10 min please", Some(10)),
            ("5mins", Some(5)),
            ("0 minutes", None),
            ("1441 minutes then 12 minutes", Some(12)),
            ("99999999999999999999 minutes", None),
            ("channel 15 minutemen", None),
        ] {
            assert_eq!(parse_time_constraint(text), expected, "{text}");
            assert_eq!(oracle_minutes(text), expected, "oracle: {text}");
        }
    }

    #[test]
    fn sentiment_positive_count() {
        let lex = Lexicons::bundled();
        let t = tally_sentiment("satisfying dinner, delicious and fresh", &lex.sentiment);
        assert_eq!((t.positive_hits, t.negative_hits), (3, 0));
        assert_eq!(t.positive_words, vec!["satisfying", "delicious", "fresh"]);
    }

    #[test]
    fn sentiment_negative_and_empty() {
        let lex = Lexicons::bundled();
        let t = tally_sentiment("bland and boring", &lex.sentiment);
        assert_eq!((t.positive_hits, t.negative_hits), (0, 2));
        let t = tally_sentiment("", &lex.sentiment);
        assert_eq!(t.total(), 0);
    }

    #[test]
    fn sentiment_counts_each_occurrence() {
        let lex = Lexicons::bundled();
        let t = tally_sentiment("Fresh, FRESH fresh!", &lex.sentiment);
        assert_eq!(t.positive_hits, 3);
        assert_eq!(t.positive_words.len(), t.positive_hits);
    }

    #[test]
    fn sarah_like_context() {
        let profile = UserProfile {
            user_id: "sarah".into(),
            goals: vec!["Healthy".into(), "nutritious".into()],
            preference_keywords: vec!["quick".into()],
            ..Default::default()
        };
        let query = Query::new("I'm hungry and in a hurry, can you make something in 15 minutes?");
        let ctx = build_unified_context(&profile, &query, &Lexicons::bundled()).unwrap();
        assert_eq!(ctx.time_constraint_minutes, Some(15));
        assert!(keywords(&ctx, DimensionId::Urgency).contains(&"hurry"));
        let goal = keywords(&ctx, DimensionId::GoalRelevance);
        assert!(goal.contains(&"healthy") && goal.contains(&"nutritious"));
        assert_eq!(ctx.hit_count(DimensionId::GoalRelevance, HitSource::Profile), 2);
    }

    #[test]
    fn alex_like_agency_hit() {
        let profile = UserProfile {
            user_id: "alex".into(),
            preference_keywords: vec!["adventurous".into(), "customized".into(), "exciting".into()],
            ..Default::default()
        };
        let ctx = build_unified_context(&profile, &Query::new("dinner ideas?"), &Lexicons::bundled())
            .unwrap();
        assert!(keywords(&ctx, DimensionId::Agency).contains(&"customized"));
    }

    #[test]
    fn zero_signal_context() {
        let ctx = build_unified_context(
            &UserProfile::default(),
            &Query::new("what is for dinner"),
            &Lexicons::bundled(),
        )
        .unwrap();
        assert!(ctx.keyword_hits.values().all(Vec::is_empty));
        assert_eq!(ctx.sentiment.total(), 0);
        assert_eq!(ctx.time_constraint_minutes, None);
    }

    #[test]
    fn blank_query_rejected() {
        let err = build_unified_context(&UserProfile::default(), &Query::new("   "), &Lexicons::bundled());
        assert!(matches!(err, Err(Error::EmptyQuery)));
    }

    #[test]
    fn hits_dedup_per_source() {
        let profile = UserProfile {
            preference_keywords: vec!["quick".into(), "QUICK".into()],
            ..Default::default()
        };
        let ctx = build_unified_context(&profile, &Query::new("quick quick meal"), &Lexicons::bundled())
            .unwrap();
        assert_eq!(ctx.hit_count(DimensionId::Urgency, HitSource::Query), 1);
        assert_eq!(ctx.hit_count(DimensionId::Urgency, HitSource::Profile), 1);
    }
}
