//! Check whether a complaint carries enough information to act on, and
//! render the follow-up question when it does not.
//!
//! Requirement schemas are boolean expressions over extracted fields
//! ("transaction_id AND (user_id OR mobile) AND booking_date"). When a
//! complaint is incomplete, the checker picks the cheapest way to satisfy
//! the schema and asks only for those fields. Run with:
//!
//! ```text
//! cargo run --example check_completeness
//! ```

use railtriage::categorize::ComplaintCategory;
use railtriage::classify::TweetType;
use railtriage::complete::{validate_completeness, validate_with_schema};
use railtriage::config::PipelineConfig;
use railtriage::extract::extract_entities;
use railtriage::textproc::{normalize, tokenize};

fn report_for(text: &str, category: ComplaintCategory, config: &PipelineConfig) {
    let tokens = tokenize(&normalize(text));
    let entities = extract_entities(&tokens, &config.gazetteer);
    let report = validate_completeness(
        TweetType::Complaint,
        Some(category),
        &entities,
        &config.schemas,
    )
    .expect("builtin schemas cover every category");

    println!("text: {text}");
    println!(
        "  category {} -> schema {:?}: {:?}",
        category.as_str(),
        report.schema_id.unwrap(),
        report.status
    );
    if let Some(prompt) = &report.prompt {
        println!("  missing {:?}", report.missing);
        println!("  ask ({} chars): {prompt}", prompt.chars().count());
    }
    println!();
}

fn main() {
    let config = PipelineConfig::builtin();

    // Complete: the water_availability schema just needs a station.
    report_for(
        "water leakage at bhandup railway station",
        ComplaintCategory::WaterAvailability,
        &config,
    );

    // Incomplete: a refund complaint with no transaction details.
    report_for(
        "money deducted but refund not received",
        ComplaintCategory::TicketingRefund,
        &config,
    );

    // Partially complete: the PNR alone satisfies the on-train schema,
    // so nothing is asked even though the train number is unknown.
    report_for(
        "pnr 4512345678 no bedroll given",
        ComplaintCategory::BedRoll,
        &config,
    );

    // The same entities under an explicit schema id: the strict
    // failed-transaction schema accepts no substitutes, so it asks for
    // every field the relaxed schema would have let the mobile number cover.
    let tokens = tokenize(&normalize(
        "money deducted but refund not received, mobile 9876543210",
    ));
    let entities = extract_entities(&tokens, &config.gazetteer);
    let relaxed = validate_completeness(
        TweetType::Complaint,
        Some(ComplaintCategory::TicketingRefund),
        &entities,
        &config.schemas,
    )
    .unwrap();
    let strict = validate_with_schema(
        "strict_failed_transaction",
        Some(ComplaintCategory::TicketingRefund),
        &entities,
        &config.schemas,
    )
    .unwrap();
    println!("with a mobile number on record:");
    println!("  relaxed schema asks for {:?}", relaxed.missing);
    println!("  strict schema asks for  {:?}", strict.missing);
}
