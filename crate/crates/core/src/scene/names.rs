//! Entity-name resolution against scene object names.
//!
//! Three match tiers, strongest first:
//!
//! | tier        | rule                                                       | score        |
//! |-------------|------------------------------------------------------------|--------------|
//! | exact       | case-folded, trimmed strings are equal                     | 1.0          |
//! | token subset| one token set contains the other                           | 0.8 ..= 0.9  |
//! | fuzzy       | mean per-name-token best edit similarity ≥ 0.6             | 0.45 ..= 0.75|
//!
//! Tokens are lowercase alphanumeric runs with articles removed (unless that
//! would leave nothing). Edit similarity is `1 - levenshtein / max(len)`.

use super::{SceneDocument, SceneError, SceneObject};
use std::collections::BTreeSet;

/// Minimum per-token similarity for a fuzzy match.
pub const FUZZY_THRESHOLD: f64 = 0.6;

const SCORE_EXACT: f64 = 1.0;
const SCORE_SUBSET_BASE: f64 = 0.8;
const SCORE_SUBSET_SPAN: f64 = 0.1;
const SCORE_FUZZY_SCALE: f64 = 0.75;

const STOP_WORDS: &[&str] = &["the", "a", "an", "of"];

/// A scene object with its match score for some query.
#[derive(Clone, Debug, PartialEq)]
pub struct NameMatch<'a> {
    pub object: &'a SceneObject,
    pub score: f64,
}

pub(crate) fn tokenize(s: &str) -> Vec<String> {
    let all: Vec<String> = s
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect();
    let content: Vec<String> = all
        .iter()
        .filter(|t| !STOP_WORDS.contains(&t.as_str()))
        .cloned()
        .collect();
    if content.is_empty() {
        all
    } else {
        content
    }
}

/// Mean over `name` tokens of the best edit similarity against any `query` token.
pub(crate) fn token_similarity(query: &[String], name: &[String]) -> f64 {
    if query.is_empty() || name.is_empty() {
        return 0.0;
    }
    let total: f64 = name
        .iter()
        .map(|n| {
            query
                .iter()
                .map(|q| strsim::normalized_levenshtein(q, n))
                .fold(0.0, f64::max)
        })
        .sum();
    total / name.len() as f64
}

/// Match score of `name` for `query`, or `None` below every tier.
pub fn name_score(query: &str, name: &str) -> Option<f64> {
    if query.trim().to_lowercase() == name.trim().to_lowercase() {
        return Some(SCORE_EXACT);
    }
    let q = tokenize(query);
    let n = tokenize(name);
    if q.is_empty() || n.is_empty() {
        return None;
    }
    let qs: BTreeSet<&String> = q.iter().collect();
    let ns: BTreeSet<&String> = n.iter().collect();
    if qs.is_subset(&ns) || ns.is_subset(&qs) {
        let shared = qs.intersection(&ns).count() as f64;
        let span = qs.len().max(ns.len()) as f64;
        return Some(SCORE_SUBSET_BASE + SCORE_SUBSET_SPAN * shared / span);
    }
    let sim = token_similarity(&q, &n);
    (sim >= FUZZY_THRESHOLD).then_some(SCORE_FUZZY_SCALE * sim)
}

/// Objects whose names match `query`, best first; ties broken by ascending id.
pub fn find_objects_by_name<'a>(scene: &'a SceneDocument, query: &str) -> Result<Vec<NameMatch<'a>>, SceneError> {
    if query.trim().is_empty() {
        return Err(SceneError::EmptyQuery);
    }
    let mut out: Vec<NameMatch<'a>> = scene
        .objects
        .iter()
        .filter_map(|object| name_score(query, &object.name).map(|score| NameMatch { object, score }))
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.object.id.cmp(&b.object.id)));
    Ok(out)
}
