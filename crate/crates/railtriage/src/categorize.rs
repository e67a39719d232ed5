//! Complaint categorization by weighted keyword scoring.
//!
//! Each category lists weighted keyword phrases in a TSV taxonomy. A
//! complaint's score per category is the sum of weights of the phrases found
//! in its tokens, longest phrase first, with each token countable only once
//! per category. The highest score wins; ties go to the category listed
//! first in the taxonomy; an all-zero scoreboard lands in the catch-all
//! category.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::extract::EntitySet;
use crate::textproc::Token;
use crate::tsv;

/// Complaint categories, mirroring how railway grievance desks split work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplaintCategory {
    DivyangjanFacilities,
    BedRoll,
    StaffBehavior,
    Cleanliness,
    PassengerAmenities,
    CoachMaintenance,
    WaterAvailability,
    UnreservedTicketing,
    CateringVending,
    TicketingRefund,
    Punctuality,
    Security,
    Miscellaneous,
}

impl ComplaintCategory {
    pub const ALL: [ComplaintCategory; 13] = [
        ComplaintCategory::DivyangjanFacilities,
        ComplaintCategory::BedRoll,
        ComplaintCategory::StaffBehavior,
        ComplaintCategory::Cleanliness,
        ComplaintCategory::PassengerAmenities,
        ComplaintCategory::CoachMaintenance,
        ComplaintCategory::WaterAvailability,
        ComplaintCategory::UnreservedTicketing,
        ComplaintCategory::CateringVending,
        ComplaintCategory::TicketingRefund,
        ComplaintCategory::Punctuality,
        ComplaintCategory::Security,
        ComplaintCategory::Miscellaneous,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ComplaintCategory::DivyangjanFacilities => "divyangjan_facilities",
            ComplaintCategory::BedRoll => "bed_roll",
            ComplaintCategory::StaffBehavior => "staff_behavior",
            ComplaintCategory::Cleanliness => "cleanliness",
            ComplaintCategory::PassengerAmenities => "passenger_amenities",
            ComplaintCategory::CoachMaintenance => "coach_maintenance",
            ComplaintCategory::WaterAvailability => "water_availability",
            ComplaintCategory::UnreservedTicketing => "unreserved_ticketing",
            ComplaintCategory::CateringVending => "catering_vending",
            ComplaintCategory::TicketingRefund => "ticketing_refund",
            ComplaintCategory::Punctuality => "punctuality",
            ComplaintCategory::Security => "security",
            ComplaintCategory::Miscellaneous => "miscellaneous",
        }
    }

    pub fn parse(s: &str) -> Option<ComplaintCategory> {
        ComplaintCategory::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
    }
}

/// One category's keyword phrases, already ordered for matching.
#[derive(Debug, Clone)]
struct CategoryRule {
    category: ComplaintCategory,
    /// (phrase words, weight), longest phrase first.
    phrases: Vec<(Vec<String>, u32)>,
}

/// The full taxonomy, in file order (which is also tie-break order).
#[derive(Debug, Clone)]
pub struct CategoryRuleSet {
    rules: Vec<CategoryRule>,
    pub version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CategorizeError {
    #[error("cannot read category taxonomy {path}: {source}")]
    FileUnreadable { path: String, source: io::Error },
    #[error("taxonomy line {line}: expected category, phrase, weight: {row:?}")]
    BadRow { line: usize, row: String },
    #[error("taxonomy line {line}: unknown category {name:?}")]
    UnknownCategory { line: usize, name: String },
    #[error("taxonomy line {line}: weight {value:?} is not a positive integer")]
    BadWeight { line: usize, value: String },
    #[error("category taxonomy has no keyword rows")]
    EmptyRuleSet,
}

impl CategoryRuleSet {
    pub fn load(path: &Path) -> Result<CategoryRuleSet, CategorizeError> {
        let content = tsv::read(path, |path, source| CategorizeError::FileUnreadable {
            path,
            source,
        })?;
        CategoryRuleSet::from_table(&content)
    }

    pub fn from_table(content: &str) -> Result<CategoryRuleSet, CategorizeError> {
        // Collect per category, keeping the max weight for repeated phrases.
        let mut order: Vec<ComplaintCategory> = Vec::new();
        let mut phrases: BTreeMap<ComplaintCategory, BTreeMap<Vec<String>, u32>> = BTreeMap::new();
        let mut total_rows = 0usize;
        for (line, row) in tsv::rows(content) {
            let cols: Vec<&str> = row.split('\t').map(str::trim).collect();
            let [name, phrase, weight] = cols.as_slice() else {
                return Err(CategorizeError::BadRow {
                    line,
                    row: row.to_string(),
                });
            };
            let category = ComplaintCategory::parse(&name.to_lowercase()).ok_or_else(|| {
                CategorizeError::UnknownCategory {
                    line,
                    name: name.to_string(),
                }
            })?;
            let words: Vec<String> = phrase
                .to_lowercase()
                .split_whitespace()
                .map(str::to_string)
                .collect();
            if words.is_empty() {
                return Err(CategorizeError::BadRow {
                    line,
                    row: row.to_string(),
                });
            }
            let weight: u32 = weight.parse().ok().filter(|w| *w > 0).ok_or_else(|| {
                CategorizeError::BadWeight {
                    line,
                    value: weight.to_string(),
                }
            })?;
            if !order.contains(&category) {
                order.push(category);
            }
            let slot = phrases
                .entry(category)
                .or_default()
                .entry(words)
                .or_insert(0);
            *slot = (*slot).max(weight);
            total_rows += 1;
        }
        if total_rows == 0 {
            return Err(CategorizeError::EmptyRuleSet);
        }

        let mut rules = Vec::new();
        for category in order {
            let mut list: Vec<(Vec<String>, u32)> = phrases
                .remove(&category)
                .unwrap_or_default()
                .into_iter()
                .collect();
            // Longest phrase first so "pnr not generated" beats "pnr";
            // alphabetical within a length for a deterministic scan order.
            list.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
            rules.push(CategoryRule {
                category,
                phrases: list,
            });
        }
        let version = tsv::content_version(&[&canonical(&rules)]);
        Ok(CategoryRuleSet { rules, version })
    }

    /// Categories in taxonomy order.
    pub fn categories(&self) -> Vec<ComplaintCategory> {
        self.rules.iter().map(|r| r.category).collect()
    }
}

fn canonical(rules: &[CategoryRule]) -> String {
    let mut out = String::new();
    for rule in rules {
        for (phrase, weight) in &rule.phrases {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                rule.category.as_str(),
                phrase.join(" "),
                weight
            ));
        }
    }
    out
}

/// The categorizer's verdict for one complaint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryAssignment {
    pub category: ComplaintCategory,
    /// Winning keyword score; 0 means the catch-all fallback fired.
    pub score: u32,
    /// Phrases that contributed to the winning category's score.
    pub matched: Vec<String>,
}

/// Score every category and pick a winner.
///
/// `entities` feeds evidence keywords cannot see: a captured transaction id
/// is strong refund signal even when the id swallowed the nearby words.
pub fn categorize(
    tokens: &[Token],
    entities: &EntitySet,
    rules: &CategoryRuleSet,
) -> Result<CategoryAssignment, CategorizeError> {
    if rules.rules.is_empty() {
        return Err(CategorizeError::EmptyRuleSet);
    }

    let mut best: Option<CategoryAssignment> = None;
    for rule in &rules.rules {
        let mut consumed = vec![false; tokens.len()];
        let mut score = 0u32;
        let mut matched = Vec::new();
        for (phrase, weight) in &rule.phrases {
            let n = phrase.len();
            if n > tokens.len() {
                continue;
            }
            'starts: for start in 0..=tokens.len() - n {
                for (k, word) in phrase.iter().enumerate() {
                    let tok = &tokens[start + k];
                    if !tok.is_wordish() || consumed[start + k] || tok.match_key() != word {
                        continue 'starts;
                    }
                }
                for slot in consumed.iter_mut().skip(start).take(n) {
                    *slot = true;
                }
                score += weight;
                matched.push(phrase.join(" "));
            }
        }
        if rule.category == ComplaintCategory::TicketingRefund && entities.transaction_id.is_some()
        {
            score += 2;
        }
        // Strictly-greater keeps the earliest category on ties.
        if best.as_ref().is_none_or(|b| score > b.score) {
            best = Some(CategoryAssignment {
                category: rule.category,
                score,
                matched,
            });
        }
    }

    let best = best.expect("at least one rule");
    if best.score == 0 {
        return Ok(CategoryAssignment {
            category: ComplaintCategory::Miscellaneous,
            score: 0,
            matched: Vec::new(),
        });
    }
    Ok(best)
}
