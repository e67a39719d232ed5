//! Pull typed entities out of noisy post text.
//!
//! Demonstrates the three extraction passes and their precedence: keyword
//! context rules ("pnr 4512345678") beat bare digit shapes, digit shapes
//! beat the station gazetteer, and every token is claimed at most once.
//! Run with:
//!
//! ```text
//! cargo run --example extract_entities
//! ```

use railtriage::config::PipelineConfig;
use railtriage::extract::extract_entities;
use railtriage::textproc::{normalize, tokenize};

fn main() {
    let config = PipelineConfig::builtin();

    let samples = [
        // Context rule: the keyword decides what the digits are.
        "pnr 4512345678 train 12555 coach s4 no water",
        // Shape rules alone: 10 digits starting 6-9 read as a mobile number.
        "contact me on 9876543210 about refund of txn hdfc9912",
        // A date keeps its slashes; "platform no 2/3" is a platform, not a date.
        "stuck at platform no 2/3 since 05/01/2022",
        // Gazetteer: the frame "at <name> railway station" boosts the match.
        "water leakage at bhandup railway station",
        // Station codes work too, and repeated mentions are recorded once.
        "no lights at gkp, gorakhpur station is in darkness",
    ];

    for text in samples {
        let tokens = tokenize(&normalize(text));
        let entities = extract_entities(&tokens, &config.gazetteer);

        println!("text: {text}");
        for field in entities.populated_fields() {
            let span = entities.spans.get(field).copied();
            let value = match field {
                "pnr" => entities.pnr.clone(),
                "train_no" => entities.train_no.clone(),
                "mobile" => entities.mobile.clone(),
                "transaction_id" => entities.transaction_id.clone(),
                "user_id" => entities.user_id.clone(),
                "booking_date" => entities.booking_date.map(|d| d.to_string()),
                "platform" => entities.platform.clone(),
                "coach" => entities.coach.clone(),
                "station" => entities
                    .station
                    .as_ref()
                    .map(|s| format!("{} ({})", s.name, s.code)),
                other => unreachable!("unlisted entity field {other}"),
            };
            println!(
                "  {field:>14} = {} (tokens {:?})",
                value.unwrap_or_default(),
                span.unwrap()
            );
        }
        for dup in &entities.duplicates {
            println!(
                "  ignored duplicate {} {:?} at tokens {:?}",
                dup.field, dup.value, dup.span
            );
        }
        println!();
    }
}
