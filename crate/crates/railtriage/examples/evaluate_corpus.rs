//! Score the pipeline against a gold-labeled corpus.
//!
//! A labeled corpus is the normal JSONL format plus a `label` key and, for
//! complaints, an optional gold `category`. This is the library call behind
//! `triage eval --input F`. Run with:
//!
//! ```text
//! cargo run --example evaluate_corpus
//! ```

use std::path::Path;

use railtriage::eval::evaluate_file;
use railtriage::Pipeline;

fn main() {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus/labeled_eval.jsonl");
    let report =
        evaluate_file(&corpus, &Pipeline::builtin()).expect("shipped corpus is well labeled");
    print!("{}", report.render_text());
}
