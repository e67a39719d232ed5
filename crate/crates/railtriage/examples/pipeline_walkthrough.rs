//! One post, every stage: the full triage record as the service emits it.
//!
//! `Pipeline::triage_one` composes normalization, annotation, type
//! classification, entity extraction, categorization, the completeness
//! check and routing into a single serializable result. Run with:
//!
//! ```text
//! cargo run --example pipeline_walkthrough
//! ```

use chrono::{TimeZone, Utc};
use railtriage::{Pipeline, TweetRecord};

fn main() {
    let pipeline = Pipeline::builtin();

    let tweet = TweetRecord {
        id: "1478688764885".to_string(),
        author_handle: "@commuter_mum".to_string(),
        created_at: Utc.with_ymd_and_hms(2022, 1, 5, 10, 0, 0).unwrap(),
        text: "water leakage at bhandup railway station platform no 2/3".to_string(),
        target_handle: "@RailwaySeva".to_string(),
    };

    let outcome = pipeline.triage_one(&tweet);
    let result = outcome.as_result().expect("this text classifies cleanly");

    println!("type:       {}", result.decision.tweet_type.as_str());
    println!("entities:   {:?}", result.entities.populated_fields());
    let category = result
        .category
        .as_ref()
        .expect("complaints are always categorized");
    println!(
        "category:   {} (score {})",
        category.category.as_str(),
        category.score
    );
    println!("complete:   {:?}", result.completeness.status);
    let routing = result
        .routing
        .as_ref()
        .expect("complaints are always routed");
    println!(
        "routed to:  {} / {} / {}",
        routing.zone, routing.division, routing.department
    );
    println!("version:    {}", result.pipeline_version);
    println!();
    println!("full record as the batch file / HTTP API would carry it:");
    println!(
        "{}",
        serde_json::to_string_pretty(result).expect("results serialize")
    );
}
