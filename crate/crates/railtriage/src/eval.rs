//! Evaluation against a gold-labeled corpus.
//!
//! The labeled corpus is the normal JSONL format plus a `label` key (gold
//! tweet type) and, for complaints, an optional `category` key. Evaluation
//! runs the full pipeline over every record and reports a 3x3 confusion
//! matrix, one-vs-rest precision/recall/F1 per class, and per-category
//! accuracy over the gold complaints.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::categorize::ComplaintCategory;
use crate::classify::TweetType;
use crate::ingest::{parse_record, IngestError, TweetRecord};
use crate::pipeline::Pipeline;

/// Gold class order used for matrix rows and columns.
pub const CLASS_ORDER: [TweetType; 3] = [
    TweetType::Complaint,
    TweetType::Suggestion,
    TweetType::Appreciation,
];

/// One gold-labeled tweet.
#[derive(Debug, Clone)]
pub struct LabeledRecord {
    pub record: TweetRecord,
    pub label: TweetType,
    /// Gold category; only meaningful when `label` is a complaint.
    pub category: Option<ComplaintCategory>,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("line {line}: {source}")]
    Record { line: usize, source: IngestError },
    #[error("line {0}: record has no gold label")]
    MissingLabel(usize),
    #[error("line {line}: unknown gold label {value:?}")]
    BadLabel { line: usize, value: String },
    #[error("line {line}: unknown gold category {value:?}")]
    BadCategory { line: usize, value: String },
    #[error(transparent)]
    Unreadable(#[from] IngestError),
}

/// Read a labeled corpus. Unlike plain ingestion, labeling mistakes are hard
/// errors: silently skipping a mislabeled line would skew every metric.
pub fn read_labeled_corpus(path: &Path) -> Result<Vec<LabeledRecord>, EvalError> {
    let content = std::fs::read_to_string(path).map_err(|source| IngestError::FileUnreadable {
        path: path.display().to_string(),
        source,
    })?;

    let mut records = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_record(line).map_err(|source| EvalError::Record {
            line: line_no,
            source,
        })?;
        let value: Value = serde_json::from_str(line).expect("parse_record already validated JSON");
        let label = match value.get("label") {
            None => return Err(EvalError::MissingLabel(line_no)),
            Some(Value::String(s)) => match s.as_str() {
                "complaint" => TweetType::Complaint,
                "suggestion" => TweetType::Suggestion,
                "appreciation" => TweetType::Appreciation,
                other => {
                    return Err(EvalError::BadLabel {
                        line: line_no,
                        value: other.to_string(),
                    })
                }
            },
            Some(other) => {
                return Err(EvalError::BadLabel {
                    line: line_no,
                    value: other.to_string(),
                })
            }
        };
        let category = match value.get("category") {
            None => None,
            Some(Value::String(s)) => {
                Some(
                    ComplaintCategory::parse(s).ok_or_else(|| EvalError::BadCategory {
                        line: line_no,
                        value: s.clone(),
                    })?,
                )
            }
            Some(other) => {
                return Err(EvalError::BadCategory {
                    line: line_no,
                    value: other.to_string(),
                })
            }
        };
        records.push(LabeledRecord {
            record,
            label,
            category,
        });
    }
    Ok(records)
}

/// One-vs-rest metrics for a single class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold records of this class.
    pub support: usize,
}

/// Accuracy of category assignment over gold complaints of one category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryAccuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

/// The full evaluation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Gold records evaluated (excluding pipeline failures).
    pub total: usize,
    /// Records the pipeline failed on (no word tokens); excluded from the
    /// matrix and metrics.
    pub failed: usize,
    /// `confusion[gold][predicted]`, classes in [`CLASS_ORDER`].
    pub confusion: [[usize; 3]; 3],
    pub accuracy: f64,
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub category_accuracy: BTreeMap<String, CategoryAccuracy>,
}

fn class_index(t: TweetType) -> usize {
    CLASS_ORDER
        .iter()
        .position(|c| *c == t)
        .expect("all classes listed")
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Run the pipeline over labeled records and score it.
pub fn evaluate(records: &[LabeledRecord], pipeline: &Pipeline) -> EvalReport {
    let mut confusion = [[0usize; 3]; 3];
    let mut failed = 0usize;
    let mut category_counts: BTreeMap<ComplaintCategory, (usize, usize)> = BTreeMap::new();

    for labeled in records {
        let outcome = pipeline.triage_one(&labeled.record);
        let Some(result) = outcome.as_result() else {
            failed += 1;
            continue;
        };
        let predicted = result.decision.tweet_type;
        confusion[class_index(labeled.label)][class_index(predicted)] += 1;

        if labeled.label == TweetType::Complaint {
            if let Some(gold_category) = labeled.category {
                let (correct, total) = category_counts.entry(gold_category).or_insert((0, 0));
                *total += 1;
                let predicted_category = result.category.as_ref().map(|a| a.category);
                if predicted == TweetType::Complaint && predicted_category == Some(gold_category) {
                    *correct += 1;
                }
            }
        }
    }

    let total: usize = confusion.iter().flatten().sum();
    let correct: usize = (0..3).map(|i| confusion[i][i]).sum();

    let mut per_class = BTreeMap::new();
    for (i, class) in CLASS_ORDER.iter().enumerate() {
        let tp = confusion[i][i];
        let gold: usize = confusion[i].iter().sum();
        let predicted: usize = (0..3).map(|r| confusion[r][i]).sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.insert(
            class.as_str().to_string(),
            ClassMetrics {
                precision,
                recall,
                f1,
                support: gold,
            },
        );
    }

    let category_accuracy = category_counts
        .into_iter()
        .map(|(category, (correct, total))| {
            (
                category.as_str().to_string(),
                CategoryAccuracy {
                    correct,
                    total,
                    accuracy: ratio(correct, total),
                },
            )
        })
        .collect();

    EvalReport {
        total,
        failed,
        confusion,
        accuracy: ratio(correct, total),
        per_class,
        category_accuracy,
    }
}

/// Read a labeled corpus file and evaluate the pipeline on it.
pub fn evaluate_file(path: &Path, pipeline: &Pipeline) -> Result<EvalReport, EvalError> {
    Ok(evaluate(&read_labeled_corpus(path)?, pipeline))
}

impl EvalReport {
    /// Plain-text rendering for terminals.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "records evaluated: {} (pipeline failures: {})",
            self.total, self.failed
        );
        let _ = writeln!(out, "accuracy: {:.3}", self.accuracy);
        let _ = writeln!(out);
        let _ = writeln!(out, "confusion matrix (rows = gold, cols = predicted)");
        let _ = writeln!(
            out,
            "{:>14} {:>10} {:>10} {:>12}",
            "", "complaint", "suggestion", "appreciation"
        );
        for (i, class) in CLASS_ORDER.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>14} {:>10} {:>10} {:>12}",
                class.as_str(),
                self.confusion[i][0],
                self.confusion[i][1],
                self.confusion[i][2]
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>14} {:>10} {:>7} {:>7} {:>8}",
            "class", "precision", "recall", "f1", "support"
        );
        for class in CLASS_ORDER {
            let m = &self.per_class[class.as_str()];
            let _ = writeln!(
                out,
                "{:>14} {:>10.3} {:>7.3} {:>7.3} {:>8}",
                class.as_str(),
                m.precision,
                m.recall,
                m.f1,
                m.support
            );
        }
        if !self.category_accuracy.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "category accuracy over gold complaints");
            for (name, acc) in &self.category_accuracy {
                let _ = writeln!(
                    out,
                    "{:>22}: {}/{} = {:.3}",
                    name, acc.correct, acc.total, acc.accuracy
                );
            }
        }
        out
    }
}
