//! HTTP/JSON front end for the triage pipeline.
//!
//! The service wraps one loaded [`Pipeline`], one [`TaskStore`] and one
//! [`ServiceMetrics`] set. Triaged complaints become persisted tasks; every
//! other endpoint reads what the triage endpoints produced. All errors are
//! returned as `{"error": "..."}` bodies with a meaningful status code:
//! 400 for malformed requests, 404 for unknown tasks, 409 for illegal state
//! transitions and 422 for records the pipeline cannot triage.

use std::sync::Arc;
use std::time::Instant;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};

use crate::categorize::ComplaintCategory;
use crate::ingest::{parse_record, IngestError, TweetRecord};
use crate::metrics::ServiceMetrics;
use crate::pipeline::{Pipeline, TriageOutcome};
use crate::store::{StoreError, TaskRecord, TaskState, TaskStore};

/// Largest batch the batch endpoint accepts in one request.
pub const MAX_BATCH_RECORDS: usize = 1000;

/// Everything a running service shares across requests.
pub struct AppState {
    pub pipeline: Pipeline,
    pub store: TaskStore,
    pub metrics: ServiceMetrics,
}

impl AppState {
    pub fn new(pipeline: Pipeline, store: TaskStore) -> Self {
        AppState {
            pipeline,
            store,
            metrics: ServiceMetrics::new(),
        }
    }

    /// Triage one record, count it, and persist the resulting task when the
    /// record is a complaint.
    fn triage_and_store(&self, record: &TweetRecord) -> Result<TriageOutcome, StoreError> {
        let start = Instant::now();
        let outcome = self.pipeline.triage_one(record);
        self.metrics.record(&outcome, start.elapsed());
        if let Some(task) = outcome.as_result().and_then(TaskRecord::for_result) {
            self.store.create(task)?;
        }
        Ok(outcome)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: String,
        source: std::io::Error,
    },
    #[error("server I/O error: {0}")]
    Io(#[from] std::io::Error),
}

fn error_body(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

/// Map a record-parsing failure onto the HTTP contract: semantically empty
/// or oversized text is unprocessable; everything else is a bad request.
fn ingest_error_response(err: &IngestError) -> Response {
    let status = match err {
        IngestError::EmptyText | IngestError::TextTooLong(_) => StatusCode::UNPROCESSABLE_ENTITY,
        _ => StatusCode::BAD_REQUEST,
    };
    error_body(status, err.to_string())
}

fn store_error_response(err: StoreError) -> Response {
    match err {
        StoreError::UnknownTask(id) => error_body(StatusCode::NOT_FOUND, format!("no task {id:?}")),
        StoreError::IllegalTransition { from, to } => error_body(
            StatusCode::CONFLICT,
            format!("cannot move a task from {from} to {to}"),
        ),
        other => error_body(StatusCode::INTERNAL_SERVER_ERROR, other.to_string()),
    }
}

async fn triage_single(State(state): State<Arc<AppState>>, body: String) -> Response {
    let record = match parse_record(&body) {
        Ok(record) => record,
        Err(err) => return ingest_error_response(&err),
    };
    match state.triage_and_store(&record) {
        Ok(TriageOutcome::Ok(result)) => (StatusCode::OK, Json(*result)).into_response(),
        Ok(TriageOutcome::Failed { error, .. }) => {
            error_body(StatusCode::UNPROCESSABLE_ENTITY, error)
        }
        Err(err) => store_error_response(err),
    }
}

async fn triage_batch(State(state): State<Arc<AppState>>, body: String) -> Response {
    let values: Vec<Value> = match serde_json::from_str(&body) {
        Ok(values) => values,
        Err(err) => {
            return error_body(
                StatusCode::BAD_REQUEST,
                format!("body must be a JSON array: {err}"),
            )
        }
    };
    if values.len() > MAX_BATCH_RECORDS {
        return error_body(
            StatusCode::BAD_REQUEST,
            format!(
                "batch of {} exceeds the limit of {MAX_BATCH_RECORDS}",
                values.len()
            ),
        );
    }
    // Validate every record before triaging any, so a rejected request has
    // no partial side effects on the store or the counters.
    let mut records = Vec::with_capacity(values.len());
    for (i, value) in values.iter().enumerate() {
        match parse_record(&value.to_string()) {
            Ok(record) => records.push(record),
            Err(err) => return error_body(StatusCode::BAD_REQUEST, format!("record {i}: {err}")),
        }
    }
    let mut outcomes = Vec::with_capacity(records.len());
    for record in &records {
        match state.triage_and_store(record) {
            Ok(outcome) => outcomes.push(outcome),
            Err(err) => return store_error_response(err),
        }
    }
    (StatusCode::OK, Json(outcomes)).into_response()
}

#[derive(Debug, serde::Deserialize)]
struct TaskQuery {
    state: Option<String>,
    category: Option<String>,
}

async fn list_tasks(
    State(state): State<Arc<AppState>>,
    Query(query): Query<TaskQuery>,
) -> Response {
    let state_filter = match query.state.as_deref() {
        None => None,
        Some(raw) => match TaskState::parse(raw) {
            Some(s) => Some(s),
            None => {
                return error_body(
                    StatusCode::BAD_REQUEST,
                    format!("unknown task state {raw:?}"),
                )
            }
        },
    };
    let category_filter = match query.category.as_deref() {
        None => None,
        Some(raw) => match ComplaintCategory::parse(raw) {
            Some(c) => Some(c.as_str()),
            None => {
                return error_body(StatusCode::BAD_REQUEST, format!("unknown category {raw:?}"))
            }
        },
    };
    (
        StatusCode::OK,
        Json(state.store.list(state_filter, category_filter)),
    )
        .into_response()
}

#[derive(Debug, serde::Deserialize)]
struct StateChange {
    state: String,
}

async fn change_task_state(
    State(state): State<Arc<AppState>>,
    Path(task_id): Path<String>,
    body: String,
) -> Response {
    let change: StateChange = match serde_json::from_str(&body) {
        Ok(change) => change,
        Err(err) => {
            return error_body(
                StatusCode::BAD_REQUEST,
                format!("body must be {{\"state\": ...}}: {err}"),
            )
        }
    };
    let Some(next) = TaskState::parse(&change.state) else {
        return error_body(
            StatusCode::BAD_REQUEST,
            format!("unknown task state {:?}", change.state),
        );
    };
    match state.store.set_state(&task_id, next) {
        Ok(task) => (StatusCode::OK, Json(task)).into_response(),
        Err(err) => store_error_response(err),
    }
}

async fn get_metrics(State(state): State<Arc<AppState>>) -> Response {
    (StatusCode::OK, Json(state.metrics.snapshot())).into_response()
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    (
        StatusCode::OK,
        Json(json!({ "status": "ok", "version": state.pipeline.config().version })),
    )
        .into_response()
}

/// Build the full API router over shared state.
pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/triage", post(triage_single))
        .route("/v1/triage/batch", post(triage_batch))
        .route("/v1/tasks", get(list_tasks))
        .route("/v1/tasks/:id/state", post(change_task_state))
        .route("/v1/metrics", get(get_metrics))
        .route("/v1/health", get(health))
        .with_state(state)
}

/// Bind `addr` and serve requests until the process receives Ctrl-C.
pub async fn serve(state: Arc<AppState>, addr: &str) -> Result<(), ServeError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind {
            addr: addr.to_string(),
            source,
        })?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
