//! Polarity lexicon, suggestion cues, negators, and prefix labels.
//!
//! All four tables are plain TSV so that operators can retune the vocabulary
//! without recompiling. The lexicon exposes a content-hash [`Lexicon::version`]
//! so downstream records can state exactly which vocabulary produced them.

use std::collections::{BTreeMap, BTreeSet};
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::TweetType;
use crate::tsv;

/// Word-level sentiment polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

/// Errors raised while loading or validating lexicon tables.
#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read lexicon file {path}: {source}")]
    FileUnreadable { path: String, source: io::Error },
    #[error("{file} line {line}: expected {expected} tab-separated columns, got: {row:?}")]
    BadRow {
        file: &'static str,
        line: usize,
        expected: usize,
        row: String,
    },
    #[error("{file} line {line}: unknown {what} {value:?}")]
    BadValue {
        file: &'static str,
        line: usize,
        what: &'static str,
        value: String,
    },
    #[error("word {0:?} is listed with conflicting polarity")]
    ConflictingPolarity(String),
    #[error("polarity lexicon contains no entries")]
    EmptyLexicon,
    #[error("prefix label table does not map any surface form to {0:?}")]
    MissingPrefixLabel(&'static str),
}

/// In-memory view of the four vocabulary tables.
#[derive(Debug, Clone)]
pub struct Lexicon {
    /// Normalized word -> polarity. Neutral words are simply absent.
    polarity: BTreeMap<String, Polarity>,
    /// Cue phrases as word sequences, longest phrase first.
    cues: Vec<Vec<String>>,
    negators: BTreeSet<String>,
    /// Normalized first-word label -> tweet type it pins.
    prefix_labels: BTreeMap<String, TweetType>,
    /// Content hash of the canonical serialization of all four tables.
    pub version: String,
}

const POLARITY_FILE: &str = "polarity.tsv";
const CUES_FILE: &str = "cues.tsv";
const NEGATORS_FILE: &str = "negators.tsv";
const PREFIX_FILE: &str = "prefix_labels.tsv";

impl Lexicon {
    /// Load the four tables (`polarity.tsv`, `cues.tsv`, `negators.tsv`,
    /// `prefix_labels.tsv`) from a directory.
    pub fn load_from_dir(dir: &Path) -> Result<Lexicon, LexiconError> {
        let read = |name: &'static str| {
            tsv::read(&dir.join(name), |path, source| {
                LexiconError::FileUnreadable { path, source }
            })
        };
        Lexicon::from_tables(
            &read(POLARITY_FILE)?,
            &read(CUES_FILE)?,
            &read(NEGATORS_FILE)?,
            &read(PREFIX_FILE)?,
        )
    }

    /// Parse the four tables from already-read file contents.
    pub fn from_tables(
        polarity_tsv: &str,
        cues_tsv: &str,
        negators_tsv: &str,
        prefix_tsv: &str,
    ) -> Result<Lexicon, LexiconError> {
        let mut polarity = BTreeMap::new();
        for (line, row) in tsv::rows(polarity_tsv) {
            let (word, pol) = split2(POLARITY_FILE, line, row)?;
            let pol = match pol.as_str() {
                "positive" => Polarity::Positive,
                "negative" => Polarity::Negative,
                _ => {
                    return Err(LexiconError::BadValue {
                        file: POLARITY_FILE,
                        line,
                        what: "polarity",
                        value: pol,
                    })
                }
            };
            let word = word.to_lowercase();
            if let Some(prev) = polarity.insert(word.clone(), pol) {
                if prev != pol {
                    return Err(LexiconError::ConflictingPolarity(word));
                }
            }
        }
        if polarity.is_empty() {
            return Err(LexiconError::EmptyLexicon);
        }

        let mut cues: Vec<Vec<String>> = Vec::new();
        for (line, row) in tsv::rows(cues_tsv) {
            let words: Vec<String> = row
                .to_lowercase()
                .split_whitespace()
                .map(str::to_string)
                .collect();
            if words.is_empty() {
                return Err(LexiconError::BadRow {
                    file: CUES_FILE,
                    line,
                    expected: 1,
                    row: row.to_string(),
                });
            }
            if !cues.contains(&words) {
                cues.push(words);
            }
        }
        // Longest phrase first so that a specific cue outranks its own prefix;
        // alphabetical within a length to keep matching order deterministic.
        cues.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));

        let mut negators = BTreeSet::new();
        for (_, row) in tsv::rows(negators_tsv) {
            negators.insert(row.to_lowercase());
        }

        let mut prefix_labels = BTreeMap::new();
        for (line, row) in tsv::rows(prefix_tsv) {
            let (word, label) = split2(PREFIX_FILE, line, row)?;
            let tweet_type = match label.as_str() {
                "complaint" => TweetType::Complaint,
                "suggestion" => TweetType::Suggestion,
                "appreciation" => TweetType::Appreciation,
                _ => {
                    return Err(LexiconError::BadValue {
                        file: PREFIX_FILE,
                        line,
                        what: "tweet type",
                        value: label,
                    })
                }
            };
            prefix_labels.insert(word.to_lowercase(), tweet_type);
        }
        for required in [
            TweetType::Complaint,
            TweetType::Suggestion,
            TweetType::Appreciation,
        ] {
            if !prefix_labels.values().any(|t| *t == required) {
                return Err(LexiconError::MissingPrefixLabel(required.as_str()));
            }
        }

        let mut lexicon = Lexicon {
            polarity,
            cues,
            negators,
            prefix_labels,
            version: String::new(),
        };
        let tables = lexicon.to_tables();
        lexicon.version = tsv::content_version(&[&tables[0], &tables[1], &tables[2], &tables[3]]);
        Ok(lexicon)
    }

    /// Polarity of a normalized word; anything not listed is neutral.
    pub fn polarity_of(&self, word: &str) -> Polarity {
        self.polarity
            .get(word)
            .copied()
            .unwrap_or(Polarity::Neutral)
    }

    pub fn is_negator(&self, word: &str) -> bool {
        self.negators.contains(word)
    }

    /// Cue phrases as normalized word sequences, longest first.
    pub fn cues(&self) -> &[Vec<String>] {
        &self.cues
    }

    /// Tweet type pinned by a leading label word, if the word is one.
    pub fn prefix_label(&self, word: &str) -> Option<TweetType> {
        self.prefix_labels.get(word).copied()
    }

    pub fn polarity_entries(&self) -> usize {
        self.polarity.len()
    }

    /// Canonical TSV serialization of the four tables, in load order
    /// (polarity, cues, negators, prefix labels). Reloading this output
    /// reproduces the lexicon, including its version stamp.
    pub fn to_tables(&self) -> [String; 4] {
        let mut polarity = String::new();
        for (word, pol) in &self.polarity {
            let pol = match pol {
                Polarity::Positive => "positive",
                Polarity::Negative => "negative",
                Polarity::Neutral => continue,
            };
            polarity.push_str(&format!("{word}\t{pol}\n"));
        }
        let mut cues: Vec<String> = self.cues.iter().map(|c| c.join(" ")).collect();
        cues.sort();
        let mut negators = String::new();
        for word in &self.negators {
            negators.push_str(word);
            negators.push('\n');
        }
        let mut prefixes = String::new();
        for (word, tweet_type) in &self.prefix_labels {
            prefixes.push_str(&format!("{word}\t{}\n", tweet_type.as_str()));
        }
        [polarity, cues.join("\n") + "\n", negators, prefixes]
    }
}

fn split2(file: &'static str, line: usize, row: &str) -> Result<(String, String), LexiconError> {
    let mut parts = row.split('\t').map(str::trim);
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
            Ok((a.to_string(), b.to_string()))
        }
        _ => Err(LexiconError::BadRow {
            file,
            line,
            expected: 2,
            row: row.to_string(),
        }),
    }
}
