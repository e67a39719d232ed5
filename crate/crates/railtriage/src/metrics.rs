//! Service counters and a latency histogram.
//!
//! Every triage performed by the HTTP service is recorded here; the
//! aggregate is served verbatim on the metrics endpoint. Counters reset
//! with the process — durable statistics belong to the task store, not to
//! this in-memory view.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::complete::CompletenessStatus;
use crate::pipeline::TriageOutcome;
use crate::route::RouteConfidence;

/// Upper bucket bounds of the latency histogram, in microseconds. A final
/// overflow bucket catches anything slower than the last bound.
pub const LATENCY_BUCKETS_US: [u64; 11] = [
    50, 100, 250, 500, 1_000, 2_500, 5_000, 10_000, 25_000, 50_000, 100_000,
];

/// Cumulative latency data. `counts[i]` holds observations at most
/// `bucket_upper_us[i]`; the trailing slot counts overflows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyHistogram {
    pub bucket_upper_us: Vec<u64>,
    pub counts: Vec<u64>,
    pub observations: u64,
    pub total_us: u64,
    pub max_us: u64,
}

impl Default for LatencyHistogram {
    fn default() -> Self {
        LatencyHistogram {
            bucket_upper_us: LATENCY_BUCKETS_US.to_vec(),
            counts: vec![0; LATENCY_BUCKETS_US.len() + 1],
            observations: 0,
            total_us: 0,
            max_us: 0,
        }
    }
}

impl LatencyHistogram {
    fn observe(&mut self, elapsed: Duration) {
        let us = u64::try_from(elapsed.as_micros()).unwrap_or(u64::MAX);
        let slot = self
            .bucket_upper_us
            .iter()
            .position(|&upper| us <= upper)
            .unwrap_or(self.bucket_upper_us.len());
        self.counts[slot] += 1;
        self.observations += 1;
        self.total_us = self.total_us.saturating_add(us);
        self.max_us = self.max_us.max(us);
    }
}

/// Point-in-time copy of all service counters; this is the JSON shape the
/// metrics endpoint returns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    /// Records triaged, including failures.
    pub processed: u64,
    /// Records the pipeline could not classify.
    pub failed: u64,
    /// Complaints that still need information from the author.
    pub incomplete: u64,
    /// Complaints routed to the default desk rather than a resolved
    /// station or train.
    pub fallback_routed: u64,
    pub per_type: BTreeMap<String, u64>,
    pub per_category: BTreeMap<String, u64>,
    pub latency: LatencyHistogram,
}

/// Shared, thread-safe counter set for a running service.
#[derive(Debug, Default)]
pub struct ServiceMetrics {
    inner: Mutex<MetricsSnapshot>,
}

impl ServiceMetrics {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one triage outcome and how long it took.
    pub fn record(&self, outcome: &TriageOutcome, elapsed: Duration) {
        let mut m = self.inner.lock().expect("metrics mutex poisoned");
        m.processed += 1;
        m.latency.observe(elapsed);
        let Some(result) = outcome.as_result() else {
            m.failed += 1;
            return;
        };
        *m.per_type
            .entry(result.decision.tweet_type.as_str().to_string())
            .or_insert(0) += 1;
        if let Some(assignment) = &result.category {
            *m.per_category
                .entry(assignment.category.as_str().to_string())
                .or_insert(0) += 1;
        }
        if result.completeness.status == CompletenessStatus::Incomplete {
            m.incomplete += 1;
        }
        if let Some(routing) = &result.routing {
            if routing.confidence == RouteConfidence::Fallback {
                m.fallback_routed += 1;
            }
        }
    }

    pub fn snapshot(&self) -> MetricsSnapshot {
        self.inner.lock().expect("metrics mutex poisoned").clone()
    }
}
