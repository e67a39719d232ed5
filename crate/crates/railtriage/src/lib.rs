//! Deterministic triage for railway-operator grievance posts.
//!
//! Passenger tweets arrive as short, noisy text ("water leakage at bhandup
//! railway station platform no 2/3"). This crate turns each one into a
//! typed, validated, categorized and routed grievance record:
//!
//! 1. [`ingest`] parses and validates raw JSONL tweet records.
//! 2. [`textproc`] normalizes text, tokenizes it, and annotates tokens with
//!    lexicon polarity under a negation window.
//! 3. [`classify`] decides complaint / suggestion / appreciation through a
//!    fixed priority cascade.
//! 4. [`extract`] pulls typed entities (PNR, train number, mobile, dates,
//!    stations, platforms, coaches) out of the token stream.
//! 5. [`categorize`] scores complaints against a weighted keyword taxonomy.
//! 6. [`complete`] checks category-specific required-field schemas and
//!    renders a follow-up prompt when information is missing.
//! 7. [`route`] assigns a zone / division / department desk.
//! 8. [`pipeline`] composes the stages; [`store`], [`metrics`], [`server`]
//!    and [`eval`] wrap the pipeline in a persistent task queue, counters,
//!    an HTTP/JSON API and an evaluation harness.
//!
//! Everything is table-driven: the lexicon, gazetteer, category keywords,
//! requirement schemas and routing tables are TSV files (builtin copies are
//! embedded; see [`config`]). For one fixed config the pipeline is fully
//! deterministic — reprocessing a corpus yields byte-identical output.
//!
//! ```
//! use railtriage::{Pipeline, TweetRecord};
//! use chrono::{TimeZone, Utc};
//!
//! let pipeline = Pipeline::builtin();
//! let tweet = TweetRecord {
//!     id: "t1".into(),
//!     author_handle: "@commuter".into(),
//!     created_at: Utc.with_ymd_and_hms(2022, 1, 5, 10, 0, 0).unwrap(),
//!     text: "water leakage at bhandup railway station platform no 2/3".into(),
//!     target_handle: "@RailwaySeva".into(),
//! };
//! let result = pipeline.triage_one(&tweet).as_result().unwrap().clone();
//! assert_eq!(result.decision.tweet_type.as_str(), "complaint");
//! assert_eq!(result.category.unwrap().category.as_str(), "water_availability");
//! assert_eq!(result.routing.unwrap().department, "Engineering/Water");
//! ```
//!
//! The `examples/` directory walks through each capability; the `triage`
//! binary exposes batch runs (`triage run`), the HTTP service
//! (`triage serve`) and evaluation (`triage eval`).

pub mod categorize;
pub mod classify;
pub mod complete;
pub mod config;
pub mod eval;
pub mod extract;
pub mod ingest;
pub mod lexicon;
pub mod metrics;
pub mod pipeline;
pub mod route;
pub mod server;
pub mod store;
pub mod textproc;
mod tsv;

/// Compiles the README's code example as a doctest so it cannot rot.
#[doc = include_str!("../../../README.md")]
#[cfg(doctest)]
pub struct ReadmeDoctests;

pub use categorize::{CategoryAssignment, ComplaintCategory};
pub use classify::{TweetType, TypeDecision};
pub use complete::{CompletenessReport, CompletenessStatus};
pub use config::{ConfigPaths, PipelineConfig};
pub use extract::EntitySet;
pub use ingest::TweetRecord;
pub use pipeline::{BatchSummary, Pipeline, TriageOutcome, TriageResult};
pub use route::RoutingAssignment;
pub use store::{TaskRecord, TaskState, TaskStore};
