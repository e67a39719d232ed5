//! Run the HTTP service in-process and talk to it.
//!
//! The same router the `triage serve` command exposes, exercised end to
//! end: triage a post, find the created task, advance it, read the
//! counters. Run with:
//!
//! ```text
//! cargo run --example serve_api
//! ```

use std::sync::Arc;

use railtriage::server::{router, AppState};
use railtriage::store::TaskStore;
use railtriage::Pipeline;

#[tokio::main]
async fn main() {
    let dir = tempfile::tempdir().unwrap();
    let store = TaskStore::open(&dir.path().join("tasks.jsonl")).unwrap();
    let state = Arc::new(AppState::new(Pipeline::builtin(), store));

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(async move {
        axum::serve(listener, router(state)).await.unwrap();
    });
    println!("serving on {base}\n");

    let client = reqwest::Client::new();

    let body = serde_json::json!({
        "id": "9001",
        "author_handle": "@refund_seeker",
        "created_at": "2022-01-06T09:30:00Z",
        "text": "booked ticket online, money deducted but ticket pnr not generated. refund not received yet",
        "target_handle": "@RailwaySeva",
    });
    let result: serde_json::Value = client
        .post(format!("{base}/v1/triage"))
        .body(body.to_string())
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    println!("POST /v1/triage");
    println!("  type      {}", result["decision"]["tweet_type"]);
    println!("  category  {}", result["category"]["category"]);
    println!("  complete  {}", result["completeness"]["status"]);
    println!("  ask       {}", result["completeness"]["prompt"]);

    let tasks: serde_json::Value = client
        .get(format!("{base}/v1/tasks?state=needs_info"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    println!("\nGET /v1/tasks?state=needs_info");
    println!(
        "  {} waiting, first is {}",
        tasks.as_array().unwrap().len(),
        tasks[0]["task_id"]
    );

    // The author replied with the details; the desk marks the task ready.
    let advanced = client
        .post(format!("{base}/v1/tasks/task-9001/state"))
        .body(r#"{"state":"ready"}"#)
        .send()
        .await
        .unwrap();
    println!(
        "\nPOST /v1/tasks/task-9001/state ready -> {}",
        advanced.status()
    );

    let metrics: serde_json::Value = client
        .get(format!("{base}/v1/metrics"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    println!("\nGET /v1/metrics");
    println!(
        "  processed {}, incomplete {}",
        metrics["processed"], metrics["incomplete"]
    );
}
