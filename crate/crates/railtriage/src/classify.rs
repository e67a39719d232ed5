//! Tweet type decision: complaint, suggestion, or appreciation.
//!
//! The decision is a fixed priority cascade over the annotated token stream:
//!
//! 1. an explicit leading label ("complaint: ...", "suggestion ...") pins the
//!    type outright;
//! 2. any negative token makes it a complaint;
//! 3. otherwise a suggestion cue phrase makes it a suggestion;
//! 4. otherwise any positive token makes it an appreciation;
//! 5. an entirely neutral tweet falls back to suggestion — neutral text aimed
//!    at an operator handle is usually a request.

use serde::{Deserialize, Serialize};

use crate::lexicon::{Lexicon, Polarity};
use crate::textproc::AnnotatedToken;

/// The three grievance classes handled downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TweetType {
    Complaint,
    Suggestion,
    Appreciation,
}

impl TweetType {
    pub fn as_str(&self) -> &'static str {
        match self {
            TweetType::Complaint => "complaint",
            TweetType::Suggestion => "suggestion",
            TweetType::Appreciation => "appreciation",
        }
    }
}

/// Which cascade rule produced the decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    /// The tweet opened with an explicit label word.
    PrefixLabel,
    /// A suggestion cue phrase matched.
    SuggestionCue,
    /// Polarity counts decided (rules 2, 4, and the neutral fallback).
    PolarityRule,
}

/// A classified tweet with the evidence behind the call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDecision {
    pub tweet_type: TweetType,
    pub trigger: Trigger,
    /// Positive word tokens after negation scoping.
    pub positive_count: usize,
    /// Negative word tokens after negation scoping.
    pub negative_count: usize,
    /// Word-like tokens considered (words and hashtags).
    pub content_tokens: usize,
    /// (token position, human-readable reason) pairs. Empty only when the
    /// tweet is entirely neutral and no cue or label fired.
    pub matched_evidence: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    /// The token stream has no word tokens at all (e.g. the tweet was only
    /// punctuation, mentions, and URLs).
    #[error("no word tokens to classify")]
    EmptyTokenStream,
}

/// Classify an annotated token stream.
pub fn classify_type(
    annotated: &[AnnotatedToken],
    lexicon: &Lexicon,
) -> Result<TypeDecision, ClassifyError> {
    let words: Vec<&AnnotatedToken> = annotated.iter().filter(|a| a.token.is_wordish()).collect();
    if words.is_empty() {
        return Err(ClassifyError::EmptyTokenStream);
    }
    let content_tokens = words.len();
    let positive_count = words
        .iter()
        .filter(|a| a.polarity == Polarity::Positive)
        .count();
    let negative_count = words
        .iter()
        .filter(|a| a.polarity == Polarity::Negative)
        .count();

    let decision = |tweet_type, trigger, matched_evidence| TypeDecision {
        tweet_type,
        trigger,
        positive_count,
        negative_count,
        content_tokens,
        matched_evidence,
    };

    // Rule 1: explicit label as the very first word.
    let first = words[0];
    let label_key = first.token.match_key().trim_end_matches([':', '-']);
    if let Some(tweet_type) = lexicon.prefix_label(label_key) {
        let evidence = vec![(first.token.position, format!("prefix label {label_key:?}"))];
        return Ok(decision(tweet_type, Trigger::PrefixLabel, evidence));
    }

    let polarity_evidence = |wanted: Polarity, note: &str| {
        words
            .iter()
            .filter(|a| a.polarity == wanted)
            .map(|a| {
                (
                    a.token.position,
                    format!("{note} {:?}", a.token.match_key()),
                )
            })
            .collect::<Vec<_>>()
    };

    // Rule 2: any negative evidence means a complaint.
    if negative_count >= 1 {
        let evidence = polarity_evidence(Polarity::Negative, "negative word");
        return Ok(decision(
            TweetType::Complaint,
            Trigger::PolarityRule,
            evidence,
        ));
    }

    // Rule 3: suggestion cue phrases (longest first, leftmost occurrence).
    if let Some((position, phrase)) = find_cue(annotated, lexicon) {
        let evidence = vec![(position, format!("suggestion cue {phrase:?}"))];
        return Ok(decision(
            TweetType::Suggestion,
            Trigger::SuggestionCue,
            evidence,
        ));
    }

    // Rule 4: positive-only evidence means appreciation.
    if positive_count >= 1 {
        let evidence = polarity_evidence(Polarity::Positive, "positive word");
        return Ok(decision(
            TweetType::Appreciation,
            Trigger::PolarityRule,
            evidence,
        ));
    }

    // Rule 5: all neutral.
    Ok(decision(
        TweetType::Suggestion,
        Trigger::PolarityRule,
        Vec::new(),
    ))
}

/// First cue phrase found, scanning phrases longest-first and positions
/// left-to-right. Cue words must appear on consecutive word-like tokens.
fn find_cue(annotated: &[AnnotatedToken], lexicon: &Lexicon) -> Option<(usize, String)> {
    for phrase in lexicon.cues() {
        let n = phrase.len();
        if n == 0 || n > annotated.len() {
            continue;
        }
        'starts: for start in 0..=annotated.len() - n {
            for (k, word) in phrase.iter().enumerate() {
                let tok = &annotated[start + k].token;
                if !tok.is_wordish() || tok.match_key() != word {
                    continue 'starts;
                }
            }
            return Some((annotated[start].token.position, phrase.join(" ")));
        }
    }
    None
}
