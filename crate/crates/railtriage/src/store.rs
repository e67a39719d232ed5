//! Durable task store: an append-only JSONL event log.
//!
//! Every accepted complaint becomes a task. The store never rewrites
//! history: creation and every state change append one event line, and the
//! in-memory index is the fold of those events (latest event per task wins).
//! Replaying the same log always rebuilds the same index, so a crash between
//! appends loses at most the event being written — which is why a corrupt
//! *final* line is repaired by truncation, while corruption anywhere else
//! means the file was edited or damaged and loading refuses to guess.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::classify::TweetType;
use crate::complete::CompletenessStatus;
use crate::pipeline::TriageResult;

/// Task lifecycle. Transitions only move forward:
/// NeedsInfo -> Ready -> Dispatched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskState {
    /// Waiting on the author to supply missing fields.
    NeedsInfo,
    /// Actionable: all required fields are present.
    Ready,
    /// Handed to the destination department.
    Dispatched,
}

impl TaskState {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskState::NeedsInfo => "needs_info",
            TaskState::Ready => "ready",
            TaskState::Dispatched => "dispatched",
        }
    }

    pub fn parse(s: &str) -> Option<TaskState> {
        match s {
            "needs_info" => Some(TaskState::NeedsInfo),
            "ready" => Some(TaskState::Ready),
            "dispatched" => Some(TaskState::Dispatched),
            _ => None,
        }
    }

    fn can_become(&self, next: TaskState) -> bool {
        matches!(
            (self, next),
            (TaskState::NeedsInfo, TaskState::Ready) | (TaskState::Ready, TaskState::Dispatched)
        )
    }
}

/// One tracked complaint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_id: String,
    pub state: TaskState,
    pub created_at: DateTime<Utc>,
    pub result: TriageResult,
}

impl TaskRecord {
    /// Build the task for a triage result. Only complaints become tasks;
    /// anything else returns `None`.
    pub fn for_result(result: &TriageResult) -> Option<TaskRecord> {
        if result.decision.tweet_type != TweetType::Complaint {
            return None;
        }
        let state = match result.completeness.status {
            CompletenessStatus::Incomplete => TaskState::NeedsInfo,
            CompletenessStatus::Complete | CompletenessStatus::NotApplicable => TaskState::Ready,
        };
        Some(TaskRecord {
            task_id: format!("task-{}", result.tweet.id),
            state,
            created_at: result.processed_at,
            result: result.clone(),
        })
    }
}

/// One line of the event log.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum StoreEvent {
    Created { task: Box<TaskRecord> },
    StateChanged { task_id: String, state: TaskState },
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("task store {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("task store {path} is corrupt at line {line}: {detail}")]
    Corrupt {
        path: String,
        line: usize,
        detail: String,
    },
    #[error("no task with id {0:?}")]
    UnknownTask(String),
    #[error("cannot move task from {from} to {to}")]
    IllegalTransition {
        from: &'static str,
        to: &'static str,
    },
}

#[derive(Debug)]
struct Inner {
    index: BTreeMap<String, TaskRecord>,
    writer: BufWriter<File>,
}

/// The store handle. Cheap to share behind an `Arc`; all methods take
/// `&self`.
#[derive(Debug)]
pub struct TaskStore {
    path: PathBuf,
    inner: Mutex<Inner>,
}

impl TaskStore {
    /// Open (or create) the event log at `path` and replay it.
    ///
    /// A final line that does not parse is treated as a torn write: the file
    /// is truncated back to the last good line and a warning is logged. A
    /// non-final bad line is a hard error.
    pub fn open(path: &Path) -> Result<TaskStore, StoreError> {
        let io_err = |source| StoreError::Io {
            path: path.display().to_string(),
            source,
        };

        let content = match std::fs::read_to_string(path) {
            Ok(c) => c,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(io_err(e)),
        };

        let mut index = BTreeMap::new();
        let mut offset = 0usize;
        let mut lines: Vec<(usize, usize, &str)> = Vec::new(); // (line_no, byte offset, text)
        for (i, line) in content.split_inclusive('\n').enumerate() {
            lines.push((i + 1, offset, line.trim_end_matches(['\n', '\r'])));
            offset += line.len();
        }

        for (pos, &(line_no, byte_offset, line)) in lines.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<StoreEvent>(line) {
                Ok(event) => apply(&mut index, event),
                Err(e) => {
                    let rest_blank = lines[pos + 1..].iter().all(|(_, _, l)| l.trim().is_empty());
                    if rest_blank {
                        tracing::warn!(
                            path = %path.display(),
                            line = line_no,
                            "truncating torn final event line: {e}"
                        );
                        let file = OpenOptions::new().write(true).open(path).map_err(io_err)?;
                        file.set_len(byte_offset as u64).map_err(io_err)?;
                        break;
                    }
                    return Err(StoreError::Corrupt {
                        path: path.display().to_string(),
                        line: line_no,
                        detail: e.to_string(),
                    });
                }
            }
        }

        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err)?;
        Ok(TaskStore {
            path: path.to_path_buf(),
            inner: Mutex::new(Inner {
                index,
                writer: BufWriter::new(file),
            }),
        })
    }

    /// Append a task-created event. Re-creating an existing id replaces the
    /// task (latest event wins), matching replay semantics.
    pub fn create(&self, task: TaskRecord) -> Result<(), StoreError> {
        let mut inner = self.inner.lock().expect("store lock");
        self.append(
            &mut inner,
            &StoreEvent::Created {
                task: Box::new(task.clone()),
            },
        )?;
        inner.index.insert(task.task_id.clone(), task);
        Ok(())
    }

    /// Append a state change, enforcing the forward-only lifecycle.
    pub fn set_state(&self, task_id: &str, state: TaskState) -> Result<TaskRecord, StoreError> {
        let mut inner = self.inner.lock().expect("store lock");
        let current = inner
            .index
            .get(task_id)
            .ok_or_else(|| StoreError::UnknownTask(task_id.to_string()))?;
        if !current.state.can_become(state) {
            return Err(StoreError::IllegalTransition {
                from: current.state.as_str(),
                to: state.as_str(),
            });
        }
        self.append(
            &mut inner,
            &StoreEvent::StateChanged {
                task_id: task_id.to_string(),
                state,
            },
        )?;
        let task = inner.index.get_mut(task_id).expect("checked above");
        task.state = state;
        Ok(task.clone())
    }

    pub fn get(&self, task_id: &str) -> Option<TaskRecord> {
        self.inner
            .lock()
            .expect("store lock")
            .index
            .get(task_id)
            .cloned()
    }

    /// Tasks in id order, optionally filtered by state and category name.
    pub fn list(&self, state: Option<TaskState>, category: Option<&str>) -> Vec<TaskRecord> {
        let inner = self.inner.lock().expect("store lock");
        inner
            .index
            .values()
            .filter(|t| state.is_none_or(|s| t.state == s))
            .filter(|t| {
                category.is_none_or(|c| {
                    t.result
                        .category
                        .as_ref()
                        .is_some_and(|assigned| assigned.category.as_str() == c)
                })
            })
            .cloned()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("store lock").index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn append(&self, inner: &mut Inner, event: &StoreEvent) -> Result<(), StoreError> {
        let io_err = |source| StoreError::Io {
            path: self.path.display().to_string(),
            source,
        };
        let line = serde_json::to_string(event).expect("events always serialize");
        writeln!(inner.writer, "{line}").map_err(io_err)?;
        // Flush per event: an acknowledged write must survive a crash.
        inner.writer.flush().map_err(io_err)
    }
}

fn apply(index: &mut BTreeMap<String, TaskRecord>, event: StoreEvent) {
    match event {
        StoreEvent::Created { task } => {
            index.insert(task.task_id.clone(), *task);
        }
        StoreEvent::StateChanged { task_id, state } => {
            if let Some(task) = index.get_mut(&task_id) {
                task.state = state;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TweetRecord;
    use crate::pipeline::Pipeline;
    use std::fs;

    fn complaint_task(id: &str, text: &str) -> TaskRecord {
        let tweet = TweetRecord {
            id: id.to_string(),
            author_handle: "@rider".to_string(),
            created_at: "2022-01-05T08:30:00Z".parse().unwrap(),
            text: text.to_string(),
            target_handle: "@railwayhelp".to_string(),
        };
        let outcome = Pipeline::builtin().triage_one(&tweet);
        TaskRecord::for_result(outcome.as_result().expect("fixture triages cleanly"))
            .expect("fixture is a complaint")
    }

    #[test]
    fn only_complaints_become_tasks() {
        let pipeline = Pipeline::builtin();
        let tweet = TweetRecord {
            id: "x".to_string(),
            author_handle: "@r".to_string(),
            created_at: "2022-01-05T08:30:00Z".parse().unwrap(),
            text: "thank you for the wonderful trip".to_string(),
            target_handle: "@h".to_string(),
        };
        let outcome = pipeline.triage_one(&tweet);
        assert!(TaskRecord::for_result(outcome.as_result().unwrap()).is_none());
    }

    #[test]
    fn initial_state_tracks_completeness() {
        let complete = complaint_task("a", "water leakage at bhandup railway station");
        assert_eq!(complete.state, TaskState::Ready);
        let incomplete = complaint_task("b", "my refund is stuck, money deducted");
        assert_eq!(incomplete.state, TaskState::NeedsInfo);
    }

    #[test]
    fn create_then_reopen_replays_the_same_index() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tasks.jsonl");
        let task = complaint_task("a", "water leakage at bhandup");
        assert_eq!(task.state, TaskState::Ready);
        {
            let store = TaskStore::open(&path).unwrap();
            store.create(task.clone()).unwrap();
            store
                .set_state(&task.task_id, TaskState::Dispatched)
                .unwrap();
        }
        let store = TaskStore::open(&path).unwrap();
        assert_eq!(store.len(), 1);
        let replayed = store.get(&task.task_id).unwrap();
        assert_eq!(replayed.state, TaskState::Dispatched);
        assert_eq!(replayed.result, task.result);
    }

    #[test]
    fn lifecycle_is_forward_only() {
        let dir = tempfile::tempdir().unwrap();
        let store = TaskStore::open(&dir.path().join("tasks.jsonl")).unwrap();
        let task = complaint_task("a", "my refund is stuck, money deducted");
        let id = task.task_id.clone();
        store.create(task).unwrap();

        // NeedsInfo cannot jump straight to Dispatched.
        let err = store.set_state(&id, TaskState::Dispatched).unwrap_err();
        assert!(matches!(
            err,
            StoreError::IllegalTransition {
                from: "needs_info",
                to: "dispatched"
            }
        ));

        store.set_state(&id, TaskState::Ready).unwrap();
        store.set_state(&id, TaskState::Dispatched).unwrap();

        // Dispatched is terminal, and a no-op transition is also illegal.
        assert!(store.set_state(&id, TaskState::Ready).is_err());
        assert!(store.set_state(&id, TaskState::Dispatched).is_err());
    }

    #[test]
    fn unknown_task_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let store = TaskStore::open(&dir.path().join("tasks.jsonl")).unwrap();
        assert!(matches!(
            store.set_state("task-none", TaskState::Ready),
            Err(StoreError::UnknownTask(_))
        ));
    }

    #[test]
    fn list_filters_by_state_and_category() {
        let dir = tempfile::tempdir().unwrap();
        let store = TaskStore::open(&dir.path().join("tasks.jsonl")).unwrap();
        store
            .create(complaint_task("a", "water leakage at bhandup"))
            .unwrap();
        store
            .create(complaint_task("b", "refund not received, money deducted"))
            .unwrap();

        assert_eq!(store.list(None, None).len(), 2);
        assert_eq!(store.list(Some(TaskState::NeedsInfo), None).len(), 1);
        assert_eq!(store.list(None, Some("water_availability")).len(), 1);
        assert_eq!(
            store
                .list(Some(TaskState::Ready), Some("ticketing_refund"))
                .len(),
            0
        );
    }

    #[test]
    fn torn_final_line_is_truncated_with_recovery() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tasks.jsonl");
        let task = complaint_task("a", "water leakage at bhandup");
        {
            let store = TaskStore::open(&path).unwrap();
            store.create(task.clone()).unwrap();
        }
        // Simulate a torn write: half an event at the end.
        let mut content = fs::read_to_string(&path).unwrap();
        content.push_str("{\"event\":\"state_changed\",\"task_id\":\"task-a\"");
        fs::write(&path, &content).unwrap();

        let store = TaskStore::open(&path).unwrap();
        assert_eq!(store.len(), 1);
        assert_eq!(store.get(&task.task_id).unwrap().state, task.state);
        // The bad tail is gone from disk and appends work again.
        store
            .set_state(&task.task_id, TaskState::Dispatched)
            .unwrap();
        let reopened = TaskStore::open(&path).unwrap();
        assert_eq!(
            reopened.get(&task.task_id).unwrap().state,
            TaskState::Dispatched
        );
    }

    #[test]
    fn mid_file_corruption_is_a_hard_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tasks.jsonl");
        {
            let store = TaskStore::open(&path).unwrap();
            store
                .create(complaint_task("a", "water leakage at bhandup"))
                .unwrap();
            store
                .create(complaint_task("b", "refund not received, money deducted"))
                .unwrap();
        }
        let content = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = content.lines().collect();
        lines[0] = "{corrupt";
        fs::write(&path, lines.join("\n")).unwrap();

        let err = TaskStore::open(&path).unwrap_err();
        assert!(
            matches!(err, StoreError::Corrupt { line: 1, .. }),
            "got {err:?}"
        );
    }

    #[test]
    fn recreating_a_task_replaces_it() {
        let dir = tempfile::tempdir().unwrap();
        let store = TaskStore::open(&dir.path().join("tasks.jsonl")).unwrap();
        let task = complaint_task("a", "my refund is stuck, money deducted");
        let id = task.task_id.clone();
        store.create(task.clone()).unwrap();
        store.set_state(&id, TaskState::Ready).unwrap();
        // The tweet came around again: triage result re-recorded.
        store.create(task.clone()).unwrap();
        assert_eq!(store.get(&id).unwrap().state, TaskState::NeedsInfo);
    }

    #[test]
    fn empty_store_file_is_fine() {
        let dir = tempfile::tempdir().unwrap();
        let store = TaskStore::open(&dir.path().join("brand_new.jsonl")).unwrap();
        assert!(store.is_empty());
    }
}
