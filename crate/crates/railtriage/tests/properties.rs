//! Generative invariants over every pipeline stage, checked with proptest.
//!
//! These complement the example-based unit tests inside each module: the
//! generators explore token orderings, negation placements, weight tables
//! and field combinations no fixture would think to write down.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::sample::select;

use railtriage::categorize::{categorize, CategoryRuleSet, ComplaintCategory};
use railtriage::classify::{classify_type, Trigger, TweetType};
use railtriage::complete::validate_with_schema;
use railtriage::config::PipelineConfig;
use railtriage::extract::{extract_entities, EntitySet, Station, ENTITY_FIELDS};
use railtriage::ingest::{parse_record, read_corpus};
use railtriage::route::route;
use railtriage::store::{TaskRecord, TaskState, TaskStore};
use railtriage::textproc::{annotate, normalize, tokenize};
use railtriage::Pipeline;

fn config() -> &'static PipelineConfig {
    use std::sync::OnceLock;
    static CONFIG: OnceLock<PipelineConfig> = OnceLock::new();
    CONFIG.get_or_init(PipelineConfig::builtin)
}

// Vocabulary pools for generated tweets. The neutral pool deliberately
// avoids lexicon entries, station names, and extraction keywords.
const POSITIVE: &[&str] = &["good", "great", "clean", "thanks", "prompt", "helpful"];
const NEGATIVE: &[&str] = &["dirty", "leakage", "broken", "late", "worst", "stinking"];
const NEUTRAL: &[&str] = &[
    "journey",
    "travel",
    "compartment",
    "window",
    "evening",
    "luggage",
    "passenger",
];
const NEGATORS: &[&str] = &["not", "no", "never", "without"];
const PUNCT: &[&str] = &[".", ",", "!", "?"];

fn word_pool() -> impl Strategy<Value = &'static str> {
    prop_oneof![
        select(POSITIVE.to_vec()),
        select(NEGATIVE.to_vec()),
        select(NEUTRAL.to_vec()),
        select(NEGATORS.to_vec()),
        select(PUNCT.to_vec()),
        Just("12555"),
        Just("#dirty"),
        Just("@railwayseva"),
    ]
}

fn tweet_text() -> impl Strategy<Value = String> {
    vec(word_pool(), 1..16).prop_map(|words| words.join(" "))
}

proptest! {
    // ------------------------------------------------------------------
    // textproc
    // ------------------------------------------------------------------

    #[test]
    fn normalize_is_idempotent(raw in ".{0,200}") {
        let once = normalize(&raw);
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn normalize_is_idempotent_on_tweetish_text(raw in tweet_text()) {
        let once = normalize(&raw);
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn annotation_preserves_token_count_and_positions(raw in tweet_text()) {
        let tokens = tokenize(&normalize(&raw));
        let annotated = annotate(&tokens, &config().lexicon);
        prop_assert_eq!(annotated.len(), tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            prop_assert_eq!(t.position, i);
            prop_assert_eq!(&annotated[i].token, t);
        }
    }

    // ------------------------------------------------------------------
    // classify
    // ------------------------------------------------------------------

    #[test]
    fn prefix_label_dominates_any_content(raw in tweet_text(), label in select(vec!["complaint", "suggestion", "appreciation", "grievance"])) {
        let lexicon = &config().lexicon;
        let expect = lexicon.prefix_label(label).expect("pool only holds shipped labels");
        let tokens = tokenize(&normalize(&format!("{label} {raw}")));
        let annotated = annotate(&tokens, lexicon);
        let decision = classify_type(&annotated, lexicon).expect("stream has a word token");
        prop_assert_eq!(decision.trigger, Trigger::PrefixLabel);
        prop_assert_eq!(decision.tweet_type, expect);
    }

    #[test]
    fn fresh_negative_evidence_forces_complaint(raw in tweet_text()) {
        let lexicon = &config().lexicon;
        let tokens = tokenize(&normalize(&raw));
        let annotated = annotate(&tokens, lexicon);
        // Mention/punctuation-only streams have no decision to preserve.
        let Ok(decision) = classify_type(&annotated, lexicon) else { return Ok(()) };
        prop_assume!(decision.trigger == Trigger::PolarityRule);

        // The period seals any open negation window, so the appended word
        // genuinely lands as negative evidence.
        let extended = tokenize(&normalize(&format!("{raw} . leakage")));
        let extended = annotate(&extended, lexicon);
        let extended = classify_type(&extended, lexicon).unwrap();
        prop_assert_eq!(extended.tweet_type, TweetType::Complaint);
        prop_assert!(extended.negative_count >= 1);
    }

    #[test]
    fn doubling_the_text_never_flips_a_polarity_decision(raw in tweet_text()) {
        let lexicon = &config().lexicon;
        let tokens = tokenize(&normalize(&raw));
        let annotated = annotate(&tokens, lexicon);
        let Ok(decision) = classify_type(&annotated, lexicon) else { return Ok(()) };
        prop_assume!(decision.trigger == Trigger::PolarityRule);

        // Punctuation at the seam keeps negation windows and cue phrases
        // from straddling the two copies.
        let doubled = tokenize(&normalize(&format!("{raw} . {raw}")));
        let doubled = annotate(&doubled, lexicon);
        let doubled = classify_type(&doubled, lexicon).unwrap();
        prop_assert_eq!(doubled.tweet_type, decision.tweet_type);
        prop_assert_eq!(doubled.positive_count, decision.positive_count * 2);
        prop_assert_eq!(doubled.negative_count, decision.negative_count * 2);
    }

    #[test]
    fn classification_is_deterministic(raw in tweet_text()) {
        let lexicon = &config().lexicon;
        let tokens = tokenize(&normalize(&raw));
        let annotated = annotate(&tokens, lexicon);
        let a = classify_type(&annotated, lexicon);
        let b = classify_type(&annotated, lexicon);
        prop_assert_eq!(a.is_err(), b.is_err());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a, b);
        }
    }

    // ------------------------------------------------------------------
    // ingest
    // ------------------------------------------------------------------

    #[test]
    fn accepted_plus_rejected_covers_every_nonblank_line(
        lines in vec(prop_oneof![
            // valid record with a generated id
            "[a-z0-9]{1,8}".prop_map(|id| format!(
                r#"{{"id":"{id}","author_handle":"@a","created_at":"2022-01-05T08:30:00Z","text":"late train","target_handle":"@b"}}"#
            )),
            Just("{broken json".to_string()),
            Just(r#"{"id":"x"}"#.to_string()),
            Just(String::new()),
            Just("   ".to_string()),
        ], 0..24),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, lines.join("\n")).unwrap();
        let batch = read_corpus(&path).unwrap();
        let nonblank = lines.iter().filter(|l| !l.trim().is_empty()).count();
        prop_assert_eq!(batch.records.len() + batch.rejected.len(), nonblank);
    }

    #[test]
    fn record_parsing_is_deterministic(id in "[a-z0-9]{1,12}", text in "[a-z ]{1,40}") {
        prop_assume!(!text.trim().is_empty());
        let line = format!(
            r#"{{"id":"{id}","author_handle":"@a","created_at":"2022-01-05T08:30:00Z","text":"{text}","target_handle":"@b"}}"#
        );
        prop_assert_eq!(parse_record(&line).unwrap(), parse_record(&line).unwrap());
    }

    // ------------------------------------------------------------------
    // extract
    // ------------------------------------------------------------------

    #[test]
    fn neutral_prefix_shifts_spans_without_changing_values(
        raw in tweet_text(),
        prefix in vec(select(NEUTRAL.to_vec()), 1..5),
    ) {
        let gazetteer = &config().gazetteer;
        let base_tokens = tokenize(&normalize(&raw));
        let base = extract_entities(&base_tokens, gazetteer);

        let shifted_text = format!("{} {raw}", prefix.join(" "));
        let shifted_tokens = tokenize(&normalize(&shifted_text));
        let offset = shifted_tokens.len() - base_tokens.len();
        let shifted = extract_entities(&shifted_tokens, gazetteer);

        let mut expected = base.clone();
        for span in expected.spans.values_mut() {
            *span = (span.0 + offset, span.1 + offset);
        }
        for dup in &mut expected.duplicates {
            dup.span = (dup.span.0 + offset, dup.span.1 + offset);
        }
        prop_assert_eq!(shifted, expected);
    }

    #[test]
    fn every_span_points_at_real_tokens(raw in tweet_text()) {
        let tokens = tokenize(&normalize(&raw));
        let entities = extract_entities(&tokens, &config().gazetteer);
        for (field, (start, end)) in &entities.spans {
            prop_assert!(start < end, "span for {} is empty", field);
            prop_assert!(*end <= tokens.len(), "span for {} runs past the stream", field);
        }
    }

    // ------------------------------------------------------------------
    // categorize
    // ------------------------------------------------------------------

    #[test]
    fn uniform_weight_scaling_never_changes_the_winner(
        rules in rule_table(),
        raw in tweet_text(),
        scale in 2u32..12,
    ) {
        let base = CategoryRuleSet::from_table(&render_rules(&rules)).unwrap();
        let scaled: Vec<(ComplaintCategory, String, u32)> =
            rules.iter().map(|(c, p, w)| (*c, p.clone(), w * scale)).collect();
        let scaled = CategoryRuleSet::from_table(&render_rules(&scaled)).unwrap();

        let tokens = tokenize(&normalize(&raw));
        let none = EntitySet::default();
        let a = categorize(&tokens, &none, &base).unwrap();
        let b = categorize(&tokens, &none, &scaled).unwrap();
        prop_assert_eq!(a.category, b.category);
        prop_assert_eq!(a.score * scale, b.score);
    }

    #[test]
    fn extra_match_for_the_winner_keeps_it_winning(rules in rule_table(), raw in tweet_text()) {
        let base = CategoryRuleSet::from_table(&render_rules(&rules)).unwrap();
        let tokens = tokenize(&normalize(&raw));
        let none = EntitySet::default();
        let before = categorize(&tokens, &none, &base).unwrap();
        prop_assume!(!tokens.is_empty());
        let Some(first_word) = tokens.iter().find(|t| t.is_wordish()) else {
            return Ok(());
        };

        let mut extended = rules.clone();
        extended.push((before.category, first_word.match_key().to_string(), 3));
        let extended = CategoryRuleSet::from_table(&render_rules(&extended)).unwrap();
        let after = categorize(&tokens, &none, &extended).unwrap();
        prop_assert_eq!(after.category, before.category);
        prop_assert!(after.score >= before.score);
    }

    // ------------------------------------------------------------------
    // complete
    // ------------------------------------------------------------------

    #[test]
    fn adding_a_field_never_uncompletes(
        schema_index in 0usize..5,
        present in vec(any::<bool>(), 9),
        extra in 0usize..9,
    ) {
        let schemas = &config().schemas;
        let schema = &schemas.schemas()[schema_index % schemas.schemas().len()];

        let mut entities = EntitySet::default();
        for (field, on) in ENTITY_FIELDS.iter().zip(&present) {
            if *on {
                populate(&mut entities, field);
            }
        }
        let before =
            validate_with_schema(&schema.schema_id, None, &entities, schemas).unwrap();

        populate(&mut entities, ENTITY_FIELDS[extra]);
        let after =
            validate_with_schema(&schema.schema_id, None, &entities, schemas).unwrap();

        use railtriage::CompletenessStatus::*;
        prop_assert!(
            !(before.status == Complete && after.status == Incomplete),
            "completing field {} broke schema {}", ENTITY_FIELDS[extra], schema.schema_id
        );
        prop_assert!(after.missing.len() <= before.missing.len());
    }

    // ------------------------------------------------------------------
    // route
    // ------------------------------------------------------------------

    #[test]
    fn routing_is_total_and_lands_on_declared_desks(
        category in select(ComplaintCategory::ALL.to_vec()),
        station_pick in proptest::option::of(0usize..40),
        train_pick in proptest::option::of(select(vec!["12555", "12951", "12123", "99999", "00001"])),
    ) {
        let config = config();
        let mut entities = EntitySet::default();
        if let Some(i) = station_pick {
            let stations = config.gazetteer.stations();
            entities.station = Some(stations[i % stations.len()].clone());
        }
        if let Some(train) = train_pick {
            entities.train_no = Some(train.to_string());
        }

        let assignment = route(category, &entities, &config.routes);

        let mut desks: BTreeSet<(String, String)> = config
            .gazetteer
            .stations()
            .iter()
            .map(|s| (s.zone.clone(), s.division.clone()))
            .collect();
        for train in ["12555", "12951", "12123"] {
            if let Some((division, zone)) = config.routes.train_route(train) {
                desks.insert((zone.to_string(), division.to_string()));
            }
        }
        let (zone, division) = config.routes.default_desk();
        desks.insert((zone.to_string(), division.to_string()));

        prop_assert!(
            desks.contains(&(assignment.zone.clone(), assignment.division.clone())),
            "assignment {:?} names an undeclared desk", assignment
        );

        // Station always wins over train when both are present.
        if let Some(station) = &entities.station {
            prop_assert_eq!(&assignment.zone, &station.zone);
            prop_assert_eq!(&assignment.division, &station.division);
        }
    }

    // ------------------------------------------------------------------
    // store
    // ------------------------------------------------------------------

    #[test]
    fn reopening_the_store_replays_to_the_same_index(ops in vec((0usize..6, 0usize..3), 1..40)) {
        let pipeline = Pipeline::builtin();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tasks.jsonl");
        let store = TaskStore::open(&path).unwrap();

        let template = pipeline
            .triage_one(&sample_complaint())
            .as_result()
            .and_then(TaskRecord::for_result)
            .expect("sample complaint yields a task");

        for (slot, action) in ops {
            let task_id = format!("task-{slot}");
            match action {
                0 => {
                    let mut task = template.clone();
                    task.task_id = task_id;
                    store.create(task).unwrap();
                }
                1 => {
                    let _ = store.set_state(&task_id, TaskState::Ready);
                }
                _ => {
                    let _ = store.set_state(&task_id, TaskState::Dispatched);
                }
            }
        }

        let live = store.list(None, None);
        drop(store);
        let reopened = TaskStore::open(&path).unwrap();
        prop_assert_eq!(reopened.list(None, None), live);
    }
}

// ----------------------------------------------------------------------
// helpers
// ----------------------------------------------------------------------

fn rule_table() -> impl Strategy<Value = Vec<(ComplaintCategory, String, u32)>> {
    let phrase = prop_oneof![
        select(NEGATIVE.to_vec()).prop_map(str::to_string),
        select(NEUTRAL.to_vec()).prop_map(str::to_string),
        select(POSITIVE.to_vec()).prop_map(str::to_string),
        (select(NEUTRAL.to_vec()), select(NEGATIVE.to_vec())).prop_map(|(a, b)| format!("{a} {b}")),
    ];
    vec(
        (select(ComplaintCategory::ALL.to_vec()), phrase, 1u32..9),
        1..12,
    )
}

fn render_rules(rules: &[(ComplaintCategory, String, u32)]) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for (category, phrase, weight) in rules {
        let _ = writeln!(out, "{}\t{}\t{}", category.as_str(), phrase, weight);
    }
    out
}

fn populate(entities: &mut EntitySet, field: &str) {
    match field {
        "pnr" => entities.pnr = Some("4512345678".to_string()),
        "train_no" => entities.train_no = Some("12555".to_string()),
        "mobile" => entities.mobile = Some("9876543210".to_string()),
        "transaction_id" => entities.transaction_id = Some("upi123".to_string()),
        "user_id" => entities.user_id = Some("rider42".to_string()),
        "booking_date" => entities.booking_date = NaiveDate::from_ymd_opt(2022, 1, 5),
        "platform" => entities.platform = Some("2/3".to_string()),
        "coach" => entities.coach = Some("S4".to_string()),
        "station" => {
            entities.station = Some(Station {
                name: "bhandup".to_string(),
                code: "BND".to_string(),
                division: "BB".to_string(),
                zone: "CR".to_string(),
            })
        }
        other => unreachable!("unlisted entity field {other}"),
    }
}

fn sample_complaint() -> railtriage::TweetRecord {
    use chrono::{TimeZone, Utc};
    railtriage::TweetRecord {
        id: "seed".to_string(),
        author_handle: "@rider".to_string(),
        created_at: Utc.with_ymd_and_hms(2022, 1, 5, 8, 30, 0).unwrap(),
        text: "water leakage at bhandup railway station".to_string(),
        target_handle: "@railwayseva".to_string(),
    }
}
