//! Persist complaints as tasks and walk them through their lifecycle.
//!
//! Every triaged complaint becomes a task: `needs_info` while the author
//! still owes details, `ready` once actionable, `dispatched` when handed to
//! the responsible desk. The store is an append-only JSONL event log;
//! reopening it replays the log and recovers every task's latest state.
//! Run with:
//!
//! ```text
//! cargo run --example task_queue
//! ```

use chrono::{TimeZone, Utc};
use railtriage::store::{TaskRecord, TaskState, TaskStore};
use railtriage::{Pipeline, TweetRecord};

fn tweet(id: &str, text: &str) -> TweetRecord {
    TweetRecord {
        id: id.to_string(),
        author_handle: "@rider".to_string(),
        created_at: Utc.with_ymd_and_hms(2022, 1, 5, 8, 30, 0).unwrap(),
        text: text.to_string(),
        target_handle: "@RailwaySeva".to_string(),
    }
}

fn main() {
    let dir = std::env::temp_dir().join("task_queue_example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tasks.jsonl");
    let _ = std::fs::remove_file(&path);

    let pipeline = Pipeline::builtin();
    let store = TaskStore::open(&path).unwrap();

    let posts = [
        tweet("q1", "water leakage at bhandup railway station"), // complete -> ready
        tweet("q2", "money deducted but refund not received"),   // incomplete -> needs_info
        tweet("q3", "thanks for the quick response"),            // appreciation -> no task
    ];
    for post in &posts {
        let outcome = pipeline.triage_one(post);
        match outcome.as_result().and_then(TaskRecord::for_result) {
            Some(task) => {
                println!("{}: {} starts {:?}", post.id, task.task_id, task.state);
                store.create(task).unwrap();
            }
            None => println!("{}: not a complaint, no task", post.id),
        }
    }

    // The complete complaint goes out the door.
    store.set_state("task-q1", TaskState::Dispatched).unwrap();
    // Tasks only move forward; going back is refused.
    let err = store
        .set_state("task-q1", TaskState::NeedsInfo)
        .unwrap_err();
    println!("\nrewinding task-q1: {err}");

    // Reopen: the log replays and every task keeps its latest state.
    drop(store);
    let reopened = TaskStore::open(&path).unwrap();
    println!("\nafter reopen ({} tasks):", reopened.len());
    for task in reopened.list(None, None) {
        println!(
            "  {} [{}] {} -> {}",
            task.task_id,
            task.state.as_str(),
            task.result
                .category
                .as_ref()
                .map(|c| c.category.as_str())
                .unwrap_or("-"),
            task.result
                .routing
                .as_ref()
                .map(|r| r.department.as_str())
                .unwrap_or("-"),
        );
    }
}
