//! The command-line contract: exit codes (0 success, 1 configuration,
//! 2 input/output), batch output, summaries, task persistence, and the
//! evaluation subcommand, all exercised through the real binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use railtriage::store::{TaskState, TaskStore};
use serde_json::Value;

fn data(path: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(path)
}

fn triage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triage"))
        .args(args)
        .output()
        .expect("spawn the triage binary")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn run_triages_a_corpus_and_prints_the_summary_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.jsonl");
    let input = data("corpus/figures.jsonl");

    let output = triage(&[
        "run",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let table = stdout(&output);
    assert!(table.contains("records triaged  5"), "summary: {table}");
    assert!(table.contains("complaints  2"));
    assert!(table.contains("suggestions  1"));
    assert!(table.contains("appreciations  2"));
    assert!(table.contains("incomplete complaints  1"));
    assert!(table.contains("water_availability  1"));

    let lines: Vec<Value> = std::fs::read_to_string(&out_path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("every output line is JSON"))
        .collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0]["tweet"]["id"], "fig1");
    assert_eq!(lines[0]["decision"]["tweet_type"], "complaint");
}

#[test]
fn summary_json_replaces_the_table_with_machine_readable_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.jsonl");
    let input = data("corpus/figures.jsonl");

    let output = triage(&[
        "run",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--summary-json",
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let printed = stdout(&output);
    let summary: Value =
        serde_json::from_str(printed.trim()).expect("stdout is a single JSON document");
    assert_eq!(summary["total"], 5);
    assert_eq!(summary["complaints"], 2);
    assert_eq!(summary["suggestions"], 1);
    assert_eq!(summary["appreciations"], 2);
    assert_eq!(summary["incomplete"], 1);
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["rejected"], 0);
    assert_eq!(summary["per_category"]["water_availability"], 1);
    assert_eq!(summary["per_category"]["ticketing_refund"], 1);
}

#[test]
fn run_with_store_persists_complaint_tasks() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.jsonl");
    let store_path = dir.path().join("tasks.jsonl");
    let input = data("corpus/figures.jsonl");

    let output = triage(&[
        "run",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--store",
        store_path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let store = TaskStore::open(&store_path).unwrap();
    assert_eq!(store.len(), 2, "only the two complaints become tasks");
    assert_eq!(store.get("task-fig1").unwrap().state, TaskState::Ready);
    assert_eq!(store.get("task-fig2").unwrap().state, TaskState::NeedsInfo);
}

#[test]
fn help_and_version_exit_zero() {
    let help = triage(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("triage"));

    let version = triage(&["--version"]);
    assert_eq!(version.status.code(), Some(0));
    assert!(stdout(&version).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn usage_errors_exit_one() {
    let unknown_flag = triage(&["run", "--frobnicate"]);
    assert_eq!(unknown_flag.status.code(), Some(1));
    assert!(!stderr(&unknown_flag).is_empty());

    let missing_args = triage(&["run"]);
    assert_eq!(missing_args.status.code(), Some(1));

    let no_subcommand = triage(&[]);
    assert_eq!(no_subcommand.status.code(), Some(1));
}

#[test]
fn bad_table_directory_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.jsonl");
    let output = triage(&[
        "run",
        "--input",
        data("corpus/figures.jsonl").to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--lexicon-dir",
        "/definitely/not/a/real/dir",
    ]);
    assert_eq!(output.status.code(), Some(1), "stderr: {}", stderr(&output));
    assert!(!stderr(&output).is_empty());
}

#[test]
fn unreadable_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.jsonl");
    let output = triage(&[
        "run",
        "--input",
        "/no/such/corpus.jsonl",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr(&output));
    assert!(!stderr(&output).is_empty());
}

#[test]
fn unwritable_output_exits_two() {
    let output = triage(&[
        "run",
        "--input",
        data("corpus/figures.jsonl").to_str().unwrap(),
        "--output",
        "/no/such/dir/out.jsonl",
    ]);
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr(&output));
}

#[test]
fn eval_prints_the_metric_report() {
    let output = triage(&[
        "eval",
        "--input",
        data("corpus/labeled_eval.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    let report = stdout(&output);
    assert!(report.contains("records evaluated: 12"), "report: {report}");
    assert!(report.contains("accuracy: 0.750"));
    assert!(report.contains("confusion matrix"));
    assert!(report.contains("precision"));
}

#[test]
fn eval_on_missing_or_unlabeled_data_exits_two() {
    let missing = triage(&["eval", "--input", "/no/such/labeled.jsonl"]);
    assert_eq!(missing.status.code(), Some(2));

    // A valid corpus without labels is unusable evaluation data.
    let dir = tempfile::tempdir().unwrap();
    let unlabeled = dir.path().join("unlabeled.jsonl");
    std::fs::copy(data("corpus/figures.jsonl"), &unlabeled).unwrap();
    let output = triage(&["eval", "--input", unlabeled.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr(&output));
    assert!(!stderr(&output).is_empty());
}

#[test]
fn serve_with_unbindable_address_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let store_path = dir.path().join("tasks.jsonl");
    let output = triage(&[
        "serve",
        "--bind",
        "definitely-not-a-host.invalid:0",
        "--store",
        store_path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr(&output));
}
