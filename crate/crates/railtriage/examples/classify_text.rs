//! Classify raw post text as complaint, suggestion or appreciation.
//!
//! Shows the priority cascade in action: an explicit leading label wins,
//! then any negative evidence, then a suggestion cue, then positive
//! evidence, and an all-neutral text defaults to suggestion. Run with:
//!
//! ```text
//! cargo run --example classify_text
//! ```

use railtriage::classify::classify_type;
use railtriage::config::PipelineConfig;
use railtriage::textproc::{annotate, normalize, tokenize};

fn main() {
    let config = PipelineConfig::builtin();

    let samples = [
        "water leakage at bhandup railway station platform no 2/3",
        "suggestion please add one more coach to this train",
        "thanks for the prompt response, great work team",
        "not happy with the food served in 12951",
        "no broken seats this time, clean coach, happy journey",
        "train from gorakhpur to mumbai", // nothing polar, no cue
    ];

    for text in samples {
        let tokens = tokenize(&normalize(text));
        let annotated = annotate(&tokens, &config.lexicon);
        let decision = classify_type(&annotated, &config.lexicon).expect("sample has word tokens");

        println!("text: {text}");
        println!(
            "  -> {} (trigger: {:?}, positive: {}, negative: {})",
            decision.tweet_type.as_str(),
            decision.trigger,
            decision.positive_count,
            decision.negative_count
        );
        for (position, evidence) in &decision.matched_evidence {
            println!("     token {position}: {evidence}");
        }
        println!();
    }
}
