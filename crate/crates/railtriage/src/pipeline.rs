//! The end-to-end triage pipeline.
//!
//! One tweet goes in; a [`TriageResult`] comes out with the type decision,
//! extracted entities, category, completeness verdict, and routing. The
//! pipeline is deterministic: the same record under the same config yields
//! byte-identical serialized results, which makes batch outputs diffable
//! and reprocessing safe.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::categorize::{categorize, CategoryAssignment};
use crate::classify::{classify_type, TweetType, TypeDecision};
use crate::complete::{validate_completeness, CompletenessReport, CompletenessStatus};
use crate::config::PipelineConfig;
use crate::extract::{extract_entities, EntitySet};
use crate::ingest::{read_corpus, IngestError, TweetRecord};
use crate::route::{route, RoutingAssignment};
use crate::textproc::{annotate, normalize, tokenize};

/// Everything the engine concluded about one tweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriageResult {
    pub tweet: TweetRecord,
    pub decision: TypeDecision,
    pub entities: EntitySet,
    /// Present iff the tweet is a complaint.
    pub category: Option<CategoryAssignment>,
    pub completeness: CompletenessReport,
    /// Present iff the tweet is a complaint.
    pub routing: Option<RoutingAssignment>,
    /// Engine + table versions that produced this result.
    pub pipeline_version: String,
    /// Pinned to the tweet's own timestamp rather than the wall clock, so
    /// the same corpus always serializes to the same bytes.
    pub processed_at: DateTime<Utc>,
}

/// Per-record outcome in a batch: a result, or a record-level failure that
/// must not abort the rest of the file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TriageOutcome {
    Ok(Box<TriageResult>),
    Failed { tweet: TweetRecord, error: String },
}

impl TriageOutcome {
    pub fn as_result(&self) -> Option<&TriageResult> {
        match self {
            TriageOutcome::Ok(r) => Some(r),
            TriageOutcome::Failed { .. } => None,
        }
    }

    pub fn tweet(&self) -> &TweetRecord {
        match self {
            TriageOutcome::Ok(r) => &r.tweet,
            TriageOutcome::Failed { tweet, .. } => tweet,
        }
    }
}

/// Counts accumulated over one batch run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    /// Records that parsed and went through the pipeline.
    pub total: usize,
    pub complaints: usize,
    pub suggestions: usize,
    pub appreciations: usize,
    /// Complaints that still need information from the author.
    pub incomplete: usize,
    /// Records the pipeline could not process (e.g. no word tokens).
    pub failed: usize,
    /// Input lines rejected before the pipeline (bad JSON, missing fields).
    pub rejected: usize,
    /// Complaint counts per category name.
    pub per_category: BTreeMap<String, usize>,
}

impl BatchSummary {
    /// Plain-text table for terminals.
    pub fn render_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let rows = [
            ("records triaged", self.total),
            ("complaints", self.complaints),
            ("suggestions", self.suggestions),
            ("appreciations", self.appreciations),
            ("incomplete complaints", self.incomplete),
            ("pipeline failures", self.failed),
            ("rejected input lines", self.rejected),
        ];
        for (label, count) in rows {
            let _ = writeln!(out, "{label:>22}  {count}");
        }
        if !self.per_category.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "complaints by category");
            for (name, count) in &self.per_category {
                let _ = writeln!(out, "{name:>22}  {count}");
            }
        }
        out
    }

    fn absorb(&mut self, outcome: &TriageOutcome) {
        self.total += 1;
        let Some(result) = outcome.as_result() else {
            self.failed += 1;
            return;
        };
        match result.decision.tweet_type {
            TweetType::Complaint => self.complaints += 1,
            TweetType::Suggestion => self.suggestions += 1,
            TweetType::Appreciation => self.appreciations += 1,
        }
        if let Some(category) = &result.category {
            *self
                .per_category
                .entry(category.category.as_str().to_string())
                .or_insert(0) += 1;
        }
        if result.completeness.status == CompletenessStatus::Incomplete {
            self.incomplete += 1;
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error(transparent)]
    Input(#[from] IngestError),
    #[error("cannot write output {path}: {source}")]
    OutputUnwritable { path: String, source: io::Error },
    #[error("task store: {0}")]
    Store(#[from] crate::store::StoreError),
}

/// The triage engine: a loaded config plus the processing logic.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Pipeline {
        Pipeline { config }
    }

    /// A pipeline over the tables embedded in the binary.
    pub fn builtin() -> Pipeline {
        Pipeline::new(PipelineConfig::builtin())
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Triage one tweet. Record-level problems (a tweet with no word tokens,
    /// say) come back as [`TriageOutcome::Failed`], never as a panic or a
    /// batch-aborting error.
    pub fn triage_one(&self, tweet: &TweetRecord) -> TriageOutcome {
        let config = &self.config;
        let tokens = tokenize(&normalize(&tweet.text));
        let annotated = annotate(&tokens, &config.lexicon);

        let decision = match classify_type(&annotated, &config.lexicon) {
            Ok(decision) => decision,
            Err(e) => {
                return TriageOutcome::Failed {
                    tweet: tweet.clone(),
                    error: e.to_string(),
                }
            }
        };
        let entities = extract_entities(&tokens, &config.gazetteer);

        let (category, completeness, routing) = if decision.tweet_type == TweetType::Complaint {
            let assignment = match categorize(&tokens, &entities, &config.categories) {
                Ok(a) => a,
                Err(e) => {
                    return TriageOutcome::Failed {
                        tweet: tweet.clone(),
                        error: e.to_string(),
                    }
                }
            };
            let completeness = match validate_completeness(
                decision.tweet_type,
                Some(assignment.category),
                &entities,
                &config.schemas,
            ) {
                Ok(report) => report,
                Err(e) => {
                    return TriageOutcome::Failed {
                        tweet: tweet.clone(),
                        error: e.to_string(),
                    }
                }
            };
            let routing = route(assignment.category, &entities, &config.routes);
            (Some(assignment), completeness, Some(routing))
        } else {
            (None, CompletenessReport::not_applicable(), None)
        };

        TriageOutcome::Ok(Box::new(TriageResult {
            tweet: tweet.clone(),
            decision,
            entities,
            category,
            completeness,
            routing,
            pipeline_version: config.version.clone(),
            processed_at: tweet.created_at,
        }))
    }

    /// Triage a JSONL corpus file into a JSONL results file (one
    /// [`TriageOutcome`] per accepted input line, in input order).
    pub fn triage_batch(&self, input: &Path, output: &Path) -> Result<BatchSummary, BatchError> {
        self.triage_batch_with(input, output, |_| Ok(()))
    }

    /// [`triage_batch`](Self::triage_batch) with a per-outcome hook, called
    /// after each output line is written. The CLI uses this to persist
    /// complaint tasks while batching; a hook error aborts the run.
    pub fn triage_batch_with(
        &self,
        input: &Path,
        output: &Path,
        mut on_outcome: impl FnMut(&TriageOutcome) -> Result<(), BatchError>,
    ) -> Result<BatchSummary, BatchError> {
        let corpus = read_corpus(input)?;
        let file = File::create(output).map_err(|source| BatchError::OutputUnwritable {
            path: output.display().to_string(),
            source,
        })?;
        let mut writer = BufWriter::new(file);

        let mut summary = BatchSummary {
            rejected: corpus.rejected.len(),
            ..BatchSummary::default()
        };
        for record in &corpus.records {
            let outcome = self.triage_one(record);
            summary.absorb(&outcome);
            let line = serde_json::to_string(&outcome).expect("triage outcomes always serialize");
            writeln!(writer, "{line}").map_err(|source| BatchError::OutputUnwritable {
                path: output.display().to_string(),
                source,
            })?;
            on_outcome(&outcome)?;
        }
        writer
            .flush()
            .map_err(|source| BatchError::OutputUnwritable {
                path: output.display().to_string(),
                source,
            })?;
        Ok(summary)
    }
}
