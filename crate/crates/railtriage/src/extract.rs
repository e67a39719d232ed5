//! Entity extraction over the token stream.
//!
//! Three rule families run in a fixed precedence order:
//!
//! 1. context rules: a keyword anchors a nearby value ("pnr 8234567890",
//!    "transaction id TXN123"), so ambiguous shapes resolve correctly;
//! 2. context-free shape rules: bare 5-digit numbers are train numbers,
//!    bare 10-digit numbers are mobiles (leading 6-9) or PNRs, dd/mm/yyyy
//!    and dd-mm-yyyy are booking dates, "platform"/"pf" plus a number is a
//!    platform, and a letter-digit word like "b2" is a coach;
//! 3. the station gazetteer, longest name first, with a boost for mentions
//!    framed as "at `<name>` railway station".
//!
//! Each token backs at most one extracted value. The first occurrence of a
//! field wins; later candidates are kept in [`EntitySet::duplicates`] so
//! nothing is silently dropped.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::textproc::{Token, TokenKind};
use crate::tsv;

/// One station row from the gazetteer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Station {
    pub name: String,
    pub code: String,
    pub division: String,
    pub zone: String,
}

/// Station lookup table, loaded from a TSV of code/name/division/zone rows.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    stations: Vec<Station>,
    /// (name split into words, index into `stations`), longest name first.
    names: Vec<(Vec<String>, usize)>,
    /// lowercase code -> index into `stations`.
    codes: BTreeMap<String, usize>,
    pub version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("cannot read station table {path}: {source}")]
    FileUnreadable { path: String, source: io::Error },
    #[error("stations line {line}: expected name, code, division, zone: {row:?}")]
    BadStationRow { line: usize, row: String },
    #[error("stations line {line}: code {code:?} already used")]
    DuplicateCode { line: usize, code: String },
}

impl Gazetteer {
    /// Every known station, in file order.
    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn load(path: &Path) -> Result<Gazetteer, ExtractError> {
        let content = tsv::read(path, |path, source| ExtractError::FileUnreadable {
            path,
            source,
        })?;
        Gazetteer::from_table(&content)
    }

    pub fn from_table(content: &str) -> Result<Gazetteer, ExtractError> {
        let mut stations = Vec::new();
        let mut codes = BTreeMap::new();
        for (line, row) in tsv::rows(content) {
            let cols: Vec<&str> = row.split('\t').map(str::trim).collect();
            let [code, name, division, zone] = cols.as_slice() else {
                return Err(ExtractError::BadStationRow {
                    line,
                    row: row.to_string(),
                });
            };
            if name.is_empty() || code.is_empty() || division.is_empty() || zone.is_empty() {
                return Err(ExtractError::BadStationRow {
                    line,
                    row: row.to_string(),
                });
            }
            let station = Station {
                name: name.to_lowercase(),
                code: code.to_uppercase(),
                division: division.to_uppercase(),
                zone: zone.to_uppercase(),
            };
            if codes
                .insert(station.code.to_lowercase(), stations.len())
                .is_some()
            {
                return Err(ExtractError::DuplicateCode {
                    line,
                    code: station.code,
                });
            }
            stations.push(station);
        }
        let mut names: Vec<(Vec<String>, usize)> = stations
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.split_whitespace().map(str::to_string).collect(), i))
            .collect();
        names.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        let version = tsv::content_version(&[&canonical(&stations)]);
        Ok(Gazetteer {
            stations,
            names,
            codes,
            version,
        })
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    pub fn by_code(&self, code: &str) -> Option<&Station> {
        self.codes
            .get(&code.to_lowercase())
            .map(|&i| &self.stations[i])
    }
}

fn canonical(stations: &[Station]) -> String {
    let mut rows: Vec<String> = stations
        .iter()
        .map(|s| format!("{}\t{}\t{}\t{}", s.code, s.name, s.division, s.zone))
        .collect();
    rows.sort();
    rows.join("\n")
}

/// A later, ignored candidate for a field that was already filled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IgnoredDuplicate {
    pub field: String,
    pub value: String,
    pub span: (usize, usize),
}

/// Everything the extractor found in one tweet.
///
/// `spans` maps a field name to the half-open token range `[start, end)` its
/// value came from; shifting the tweet right by k tokens shifts every span
/// by k.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySet {
    pub pnr: Option<String>,
    pub train_no: Option<String>,
    pub mobile: Option<String>,
    pub transaction_id: Option<String>,
    pub user_id: Option<String>,
    pub booking_date: Option<NaiveDate>,
    pub station: Option<Station>,
    pub platform: Option<String>,
    pub coach: Option<String>,
    pub spans: BTreeMap<String, (usize, usize)>,
    pub duplicates: Vec<IgnoredDuplicate>,
}

impl EntitySet {
    /// Names of the fields that hold a value, for requirement checking.
    pub fn populated_fields(&self) -> Vec<&'static str> {
        let mut fields = Vec::new();
        let mut push = |name, present| {
            if present {
                fields.push(name);
            }
        };
        push("pnr", self.pnr.is_some());
        push("train_no", self.train_no.is_some());
        push("mobile", self.mobile.is_some());
        push("transaction_id", self.transaction_id.is_some());
        push("user_id", self.user_id.is_some());
        push("booking_date", self.booking_date.is_some());
        push("station", self.station.is_some());
        push("platform", self.platform.is_some());
        push("coach", self.coach.is_some());
        fields
    }

    pub fn is_empty(&self) -> bool {
        self.populated_fields().is_empty()
    }
}

/// All field names an extraction can produce, in the order they are checked.
pub const ENTITY_FIELDS: [&str; 9] = [
    "pnr",
    "train_no",
    "mobile",
    "transaction_id",
    "user_id",
    "booking_date",
    "station",
    "platform",
    "coach",
];

struct Extraction<'a> {
    tokens: &'a [Token],
    consumed: Vec<bool>,
    entities: EntitySet,
}

impl<'a> Extraction<'a> {
    fn free(&self, span: (usize, usize)) -> bool {
        !self.consumed[span.0..span.1].iter().any(|&c| c)
    }

    /// Claim `span` for `field` if the field is still open; otherwise record
    /// the candidate as an ignored duplicate. Returns whether it was set.
    fn claim(
        &mut self,
        field: &'static str,
        value: String,
        span: (usize, usize),
        slot_taken: bool,
    ) -> bool {
        if slot_taken {
            self.entities.duplicates.push(IgnoredDuplicate {
                field: field.to_string(),
                value,
                span,
            });
            return false;
        }
        self.entities.spans.insert(field.to_string(), span);
        for i in span.0..span.1 {
            self.consumed[i] = true;
        }
        true
    }
}

/// Run all extraction rules over one token stream.
pub fn extract_entities(tokens: &[Token], gazetteer: &Gazetteer) -> EntitySet {
    let mut ex = Extraction {
        tokens,
        consumed: vec![false; tokens.len()],
        entities: EntitySet::default(),
    };
    context_rules(&mut ex);
    shape_rules(&mut ex);
    station_rule(&mut ex, gazetteer);
    ex.entities
}

/// Keyword-anchored rules. These run first so that, for example, a 10-digit
/// number right after "pnr" is a PNR even if it starts with 9.
fn context_rules(ex: &mut Extraction) {
    let n = ex.tokens.len();

    // "pnr" followed within three tokens by a 10-digit number.
    for i in 0..n {
        if !is_keyword(&ex.tokens[i], &["pnr"]) {
            continue;
        }
        for j in i + 1..n.min(i + 4) {
            let tok = &ex.tokens[j];
            if tok.kind == TokenKind::Number
                && all_digits(&tok.norm)
                && tok.norm.len() == 10
                && ex.free((j, j + 1))
            {
                let taken = ex.entities.pnr.is_some();
                if ex.claim("pnr", tok.norm.clone(), (j, j + 1), taken) {
                    ex.entities.pnr = Some(tok.norm.clone());
                }
                break;
            }
        }
    }

    // "mobile"/"phone"/"mob" followed within three tokens by a valid mobile.
    for i in 0..n {
        if !is_keyword(&ex.tokens[i], &["mobile", "phone", "mob"]) {
            continue;
        }
        for j in i + 1..n.min(i + 4) {
            let tok = &ex.tokens[j];
            if tok.kind == TokenKind::Number && is_mobile(&tok.norm) && ex.free((j, j + 1)) {
                let taken = ex.entities.mobile.is_some();
                if ex.claim("mobile", tok.norm.clone(), (j, j + 1), taken) {
                    ex.entities.mobile = Some(tok.norm.clone());
                }
                break;
            }
        }
    }

    // "transaction"/"txn" (optional "id"/"no") then an alphanumeric value.
    // The value must contain a digit: in "transaction failed" the word
    // "failed" is not an id.
    for i in 0..n {
        if !is_keyword(&ex.tokens[i], &["transaction", "txn"]) {
            continue;
        }
        let mut j = i + 1;
        if j < n && is_keyword(&ex.tokens[j], &["id", "no"]) {
            j += 1;
        }
        let Some(tok) = ex.tokens.get(j) else {
            continue;
        };
        let value_like = matches!(tok.kind, TokenKind::Word | TokenKind::Number)
            && tok.norm.chars().all(|c| c.is_ascii_alphanumeric())
            && tok.norm.chars().any(|c| c.is_ascii_digit());
        if value_like && ex.free((j, j + 1)) {
            let taken = ex.entities.transaction_id.is_some();
            if ex.claim("transaction_id", tok.norm.clone(), (j, j + 1), taken) {
                ex.entities.transaction_id = Some(tok.norm.clone());
            }
        }
    }

    // "user id <value>" or "userid <value>".
    for i in 0..n {
        let two_word = is_keyword(&ex.tokens[i], &["user"])
            && ex.tokens.get(i + 1).is_some_and(|t| is_keyword(t, &["id"]));
        let one_word = is_keyword(&ex.tokens[i], &["userid"]);
        if !two_word && !one_word {
            continue;
        }
        let j = if two_word { i + 2 } else { i + 1 };
        let Some(tok) = ex.tokens.get(j) else {
            continue;
        };
        let value_like = matches!(tok.kind, TokenKind::Word | TokenKind::Number)
            && tok.norm.chars().all(|c| c.is_ascii_alphanumeric());
        if value_like && ex.free((j, j + 1)) {
            let taken = ex.entities.user_id.is_some();
            if ex.claim("user_id", tok.norm.clone(), (j, j + 1), taken) {
                ex.entities.user_id = Some(tok.norm.clone());
            }
        }
    }
}

/// Context-free shapes over whatever the context rules left unclaimed.
fn shape_rules(ex: &mut Extraction) {
    let n = ex.tokens.len();

    for j in 0..n {
        let tok = &ex.tokens[j];
        if tok.kind != TokenKind::Number || !ex.free((j, j + 1)) {
            continue;
        }
        if all_digits(&tok.norm) {
            match tok.norm.len() {
                5 => {
                    let taken = ex.entities.train_no.is_some();
                    if ex.claim("train_no", tok.norm.clone(), (j, j + 1), taken) {
                        ex.entities.train_no = Some(tok.norm.clone());
                    }
                }
                10 if is_mobile(&tok.norm) => {
                    let taken = ex.entities.mobile.is_some();
                    if ex.claim("mobile", tok.norm.clone(), (j, j + 1), taken) {
                        ex.entities.mobile = Some(tok.norm.clone());
                    }
                }
                10 => {
                    let taken = ex.entities.pnr.is_some();
                    if ex.claim("pnr", tok.norm.clone(), (j, j + 1), taken) {
                        ex.entities.pnr = Some(tok.norm.clone());
                    }
                }
                _ => {}
            }
        } else if let Some(date) = parse_date(&tok.norm) {
            let taken = ex.entities.booking_date.is_some();
            if ex.claim("booking_date", tok.norm.clone(), (j, j + 1), taken) {
                ex.entities.booking_date = Some(date);
            }
        }
    }

    // "platform"/"pf", optional "no"/"number", then a number token. Runs
    // after the digit shapes on purpose: "platform 12555" reads as a train
    // number standing at a platform, not platform twelve-thousand.
    for i in 0..n {
        if !is_keyword(&ex.tokens[i], &["platform", "pf"]) {
            continue;
        }
        let mut j = i + 1;
        if j < n && is_keyword(&ex.tokens[j], &["no", "number"]) {
            j += 1;
        }
        let Some(tok) = ex.tokens.get(j) else {
            continue;
        };
        if tok.kind == TokenKind::Number && ex.free((j, j + 1)) {
            let taken = ex.entities.platform.is_some();
            if ex.claim("platform", tok.norm.clone(), (j, j + 1), taken) {
                ex.entities.platform = Some(tok.norm.clone());
            }
        }
    }

    // A short letter-plus-digits word is a coach label: b2, s4, d11.
    for j in 0..n {
        let tok = &ex.tokens[j];
        if tok.kind != TokenKind::Word || !ex.free((j, j + 1)) {
            continue;
        }
        let mut chars = tok.norm.chars();
        let coach_like = chars.next().is_some_and(|c| c.is_ascii_lowercase()) && {
            let digits: Vec<char> = chars.collect();
            (1..=2).contains(&digits.len()) && digits.iter().all(char::is_ascii_digit)
        };
        if coach_like {
            let value = tok.norm.to_uppercase();
            let taken = ex.entities.coach.is_some();
            if ex.claim("coach", value.clone(), (j, j + 1), taken) {
                ex.entities.coach = Some(value);
            }
        }
    }
}

/// Gazetteer matching: collect every name and code hit, then pick one by
/// (frame boost, match length, position). A mention framed as
/// "at <name> railway station" outranks longer unframed matches.
fn station_rule(ex: &mut Extraction, gazetteer: &Gazetteer) {
    struct Candidate {
        station: usize,
        span: (usize, usize),
        boost: u8,
    }

    let tokens = ex.tokens;
    let n = tokens.len();
    let mut candidates: Vec<Candidate> = Vec::new();

    let word_at = |p: usize, want: &str| -> bool {
        tokens
            .get(p)
            .is_some_and(|t| t.is_wordish() && t.match_key() == want)
    };
    let boost_of = |p: usize, end: usize| -> u8 {
        let pre = p > 0 && word_at(p - 1, "at");
        let post = word_at(end, "railway") && word_at(end + 1, "station");
        pre as u8 + post as u8
    };

    for p in 0..n {
        if !tokens[p].is_wordish() || !ex.free((p, p + 1)) {
            continue;
        }
        for (name, idx) in &gazetteer.names {
            let end = p + name.len();
            if end > n {
                continue;
            }
            let hit = name.iter().enumerate().all(|(k, w)| {
                let t = &tokens[p + k];
                t.is_wordish() && ex.free((p + k, p + k + 1)) && t.match_key() == w
            });
            if hit {
                candidates.push(Candidate {
                    station: *idx,
                    span: (p, end),
                    boost: boost_of(p, end),
                });
            }
        }
        if let Some(&idx) = gazetteer.codes.get(tokens[p].match_key()) {
            candidates.push(Candidate {
                station: idx,
                span: (p, p + 1),
                boost: boost_of(p, p + 1),
            });
        }
    }

    if candidates.is_empty() {
        return;
    }
    candidates.sort_by(|a, b| {
        b.boost
            .cmp(&a.boost)
            .then_with(|| (b.span.1 - b.span.0).cmp(&(a.span.1 - a.span.0)))
            .then_with(|| a.span.0.cmp(&b.span.0))
    });

    let winner = &candidates[0];
    let station = gazetteer.stations[winner.station].clone();
    let span = winner.span;
    ex.entities.station = Some(station);
    ex.entities.spans.insert("station".to_string(), span);
    for i in span.0..span.1 {
        ex.consumed[i] = true;
    }

    // Non-overlapping losers are genuine second mentions; keep them visible.
    let mut taken_spans = vec![span];
    for c in &candidates[1..] {
        let overlaps = taken_spans.iter().any(|s| c.span.0 < s.1 && s.0 < c.span.1);
        if !overlaps {
            taken_spans.push(c.span);
            ex.entities.duplicates.push(IgnoredDuplicate {
                field: "station".to_string(),
                value: gazetteer.stations[c.station].name.clone(),
                span: c.span,
            });
        }
    }
}

fn is_keyword(token: &Token, words: &[&str]) -> bool {
    token.is_wordish() && words.contains(&token.match_key())
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit())
}

fn is_mobile(s: &str) -> bool {
    s.len() == 10 && all_digits(s) && s.starts_with(['6', '7', '8', '9'])
}

/// dd/mm/yyyy or dd-mm-yyyy, rejecting impossible calendar dates.
fn parse_date(s: &str) -> Option<NaiveDate> {
    let parts: Vec<&str> = s.split(['/', '-']).collect();
    let [d, m, y] = parts.as_slice() else {
        return None;
    };
    if !(1..=2).contains(&d.len()) || !(1..=2).contains(&m.len()) || y.len() != 4 {
        return None;
    }
    NaiveDate::from_ymd_opt(y.parse().ok()?, m.parse().ok()?, d.parse().ok()?)
}
