//! Batch-triage a JSONL corpus file and print the run summary.
//!
//! This is the library call behind `triage run --input F --output F`. The
//! output file carries one JSON outcome per accepted input line, in input
//! order, and reprocessing the same corpus yields byte-identical output.
//! Run with:
//!
//! ```text
//! cargo run --example triage_batch
//! ```

use std::path::Path;

use railtriage::Pipeline;

fn main() {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus/figures.jsonl");
    let output = std::env::temp_dir().join("triage_batch_example.jsonl");

    let pipeline = Pipeline::builtin();
    let summary = pipeline
        .triage_batch(&corpus, &output)
        .expect("shipped corpus triages");

    println!("triaged {} -> {}", corpus.display(), output.display());
    println!();
    print!("{}", summary.render_text());
    println!();

    let again = std::env::temp_dir().join("triage_batch_example_again.jsonl");
    pipeline
        .triage_batch(&corpus, &again)
        .expect("shipped corpus triages");
    let identical = std::fs::read(&output).unwrap() == std::fs::read(&again).unwrap();
    println!("second run byte-identical: {identical}");
}
