//! Corpus ingestion: one JSON object per line, one tweet per object.
//!
//! A corpus file never fails wholesale because of one bad line: rejects are
//! collected per line with the reason, so an operator can fix the file
//! instead of guessing. Only an unreadable file is a hard error.

use std::collections::HashSet;
use std::io;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Longest accepted tweet text, in characters. Anything longer is almost
/// certainly not a tweet and is rejected rather than silently truncated.
pub const MAX_TEXT_CHARS: usize = 4096;

/// One ingested tweet, already shape-validated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub author_handle: String,
    pub created_at: DateTime<Utc>,
    pub text: String,
    /// The operator handle the tweet was addressed to.
    pub target_handle: String,
}

/// A parsed corpus: accepted records plus per-line rejects.
#[derive(Debug)]
pub struct CorpusBatch {
    pub records: Vec<TweetRecord>,
    pub source_path: String,
    /// (1-based line number, why the line was rejected).
    pub rejected: Vec<(usize, IngestError)>,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read corpus {path}: {source}")]
    FileUnreadable { path: String, source: io::Error },
    #[error("line is not a JSON object: {0}")]
    MalformedLine(String),
    #[error("missing or non-string field {0:?}")]
    MissingField(&'static str),
    #[error("text is empty after trimming")]
    EmptyText,
    #[error("text has {0} characters, limit is {MAX_TEXT_CHARS}")]
    TextTooLong(usize),
    #[error("created_at {0:?} is not an RFC 3339 timestamp")]
    BadTimestamp(String),
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
}

/// Parse a single corpus line. Unknown JSON keys are ignored so that files
/// can carry annotations (labels, notes) the engine does not consume.
pub fn parse_record(line: &str) -> Result<TweetRecord, IngestError> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| IngestError::MalformedLine(e.to_string()))?;
    let object = value
        .as_object()
        .ok_or_else(|| IngestError::MalformedLine("not an object".to_string()))?;

    let field = |name: &'static str| -> Result<&str, IngestError> {
        match object.get(name).and_then(Value::as_str) {
            Some(s) if !s.trim().is_empty() => Ok(s),
            _ => Err(IngestError::MissingField(name)),
        }
    };

    let id = field("id")?.to_string();
    let author_handle = field("author_handle")?.to_string();
    let target_handle = field("target_handle")?.to_string();

    let raw_created = field("created_at")?;
    let created_at = DateTime::parse_from_rfc3339(raw_created)
        .map_err(|_| IngestError::BadTimestamp(raw_created.to_string()))?
        .with_timezone(&Utc);

    // Text gets its own checks: present-but-blank and oversized are distinct
    // failures from a missing key.
    let text = match object.get("text").and_then(Value::as_str) {
        None => return Err(IngestError::MissingField("text")),
        Some(s) if s.trim().is_empty() => return Err(IngestError::EmptyText),
        Some(s) => s.to_string(),
    };
    let chars = text.chars().count();
    if chars > MAX_TEXT_CHARS {
        return Err(IngestError::TextTooLong(chars));
    }

    Ok(TweetRecord {
        id,
        author_handle,
        created_at,
        text,
        target_handle,
    })
}

/// Read a whole JSONL corpus. Blank lines are skipped; every other line
/// either becomes a record or a reject. Records seen after an id repeat are
/// rejected as duplicates; the first occurrence stands.
pub fn read_corpus(path: &Path) -> Result<CorpusBatch, IngestError> {
    let content = std::fs::read_to_string(path).map_err(|source| IngestError::FileUnreadable {
        path: path.display().to_string(),
        source,
    })?;

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(line) {
            Ok(record) if !seen.insert(record.id.clone()) => {
                rejected.push((line_no, IngestError::DuplicateId(record.id)));
            }
            Ok(record) => records.push(record),
            Err(e) => rejected.push((line_no, e)),
        }
    }
    Ok(CorpusBatch {
        records,
        source_path: path.display().to_string(),
        rejected,
    })
}
