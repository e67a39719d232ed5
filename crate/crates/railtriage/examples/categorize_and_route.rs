//! Score a complaint against the keyword taxonomy and route it to a desk.
//!
//! Categorization sums the weights of matched keyword phrases per category
//! (longest phrase first, each token consumed once per category) and takes
//! the strict maximum. Routing then resolves a zone/division from the
//! mentioned station, else the train, else the configured default desk.
//! Run with:
//!
//! ```text
//! cargo run --example categorize_and_route
//! ```

use railtriage::categorize::categorize;
use railtriage::config::PipelineConfig;
use railtriage::extract::extract_entities;
use railtriage::route::route;
use railtriage::textproc::{normalize, tokenize};

fn main() {
    let config = PipelineConfig::builtin();

    let samples = [
        // Station mention -> routed where the problem is.
        "water leakage at bhandup railway station platform no 2/3",
        // No station, but the train table knows 12555's home division.
        "toilet very dirty in coach s4 of train 12555",
        // Transaction id nudges the tie toward the refund desk.
        "payment failed txn upi20220105 money gone",
        // Nothing matches: miscellaneous, default desk, flagged as fallback.
        "very bad experience yesterday",
    ];

    for text in samples {
        let tokens = tokenize(&normalize(text));
        let entities = extract_entities(&tokens, &config.gazetteer);
        let assignment = categorize(&tokens, &entities, &config.categories)
            .expect("builtin rules are non-empty");
        let routing = route(assignment.category, &entities, &config.routes);

        println!("text: {text}");
        println!(
            "  category {} (score {})",
            assignment.category.as_str(),
            assignment.score
        );
        for hit in &assignment.matched {
            println!("    matched {hit:?}");
        }
        println!(
            "  route -> zone {} / division {} / {} ({:?}, basis {:?})",
            routing.zone, routing.division, routing.department, routing.confidence, routing.basis
        );
        println!();
    }
}
