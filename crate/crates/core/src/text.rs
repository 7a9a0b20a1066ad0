//! Tokenization shared by every keyword matcher: lowercase, split on
//! non-alphanumerics, whole-token comparison. No stemming.

use std::collections::BTreeSet;

pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn token_set<'a, I>(texts: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a str>,
{
    texts.into_iter().flat_map(tokenize).collect()
}

/// Function words ignored by surface-level overlap matching.
pub const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "can", "do", "for", "from", "i",
    "if", "in", "is", "it", "m", "me", "my", "of", "on", "or", "s", "so", "some", "something",
    "that", "the", "this", "to", "tonight", "want", "was", "what", "with", "you", "your",
];

/// Distinct tokens of `text` in first-occurrence order, stopwords removed.
pub fn content_tokens(text: &str) -> Vec<String> {
    let mut seen = BTreeSet::new();
    tokenize(text)
        .into_iter()
        .filter(|t| !STOPWORDS.contains(&t.as_str()) && seen.insert(t.clone()))
        .collect()
}

/// Lowercases and trims a keyword; empty results are dropped by callers.
pub fn normalize_keyword(word: &str) -> String {
    word.trim().to_lowercase()
}
