//! Completeness checking and follow-up prompt rendering.
//!
//! Whether a complaint is actionable depends on its category: a refund needs
//! transaction details, an on-train defect needs the train identified. Each
//! requirement schema states what it needs as a boolean expression over
//! extracted fields, e.g. `pnr OR (train_no AND booking_date)`. When the
//! expression is unsatisfied, the cheapest way to satisfy it (the branch
//! with the fewest missing fields) becomes the ask in a follow-up prompt.

use std::collections::{BTreeMap, BTreeSet};
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::categorize::ComplaintCategory;
use crate::classify::TweetType;
use crate::extract::{EntitySet, ENTITY_FIELDS};
use crate::tsv;

/// Hard ceiling for a rendered prompt, matching the channel's message limit.
pub const MAX_PROMPT_CHARS: usize = 280;

/// A boolean requirement over extracted field names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReqExpr {
    Field(String),
    And(Vec<ReqExpr>),
    Or(Vec<ReqExpr>),
}

impl ReqExpr {
    /// Parse `pnr OR (train_no AND booking_date)`. `AND` binds tighter than
    /// `OR`; parentheses group; field names must be known entity fields.
    pub fn parse(input: &str) -> Result<ReqExpr, CompleteError> {
        let tokens = lex_expr(input)?;
        let mut pos = 0;
        let expr = parse_or(&tokens, &mut pos, input)?;
        if pos != tokens.len() {
            return Err(CompleteError::BadExpression {
                expr: input.to_string(),
                reason: format!("unexpected {:?}", tokens[pos]),
            });
        }
        Ok(expr)
    }

    /// True when `populated` satisfies the expression.
    pub fn satisfied_by(&self, populated: &BTreeSet<&str>) -> bool {
        match self {
            ReqExpr::Field(f) => populated.contains(f.as_str()),
            ReqExpr::And(es) => es.iter().all(|e| e.satisfied_by(populated)),
            ReqExpr::Or(es) => es.iter().any(|e| e.satisfied_by(populated)),
        }
    }

    /// The expression as disjunctive branches: each inner vec is one
    /// conjunction of fields that alone satisfies the expression. Branch
    /// order follows the written expression left to right.
    pub fn branches(&self) -> Vec<Vec<String>> {
        match self {
            ReqExpr::Field(f) => vec![vec![f.clone()]],
            ReqExpr::Or(es) => es.iter().flat_map(|e| e.branches()).collect(),
            ReqExpr::And(es) => {
                let mut acc: Vec<Vec<String>> = vec![Vec::new()];
                for e in es {
                    let mut next = Vec::new();
                    for prefix in &acc {
                        for branch in e.branches() {
                            let mut merged = prefix.clone();
                            for field in branch {
                                if !merged.contains(&field) {
                                    merged.push(field);
                                }
                            }
                            next.push(merged);
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }

    /// Every field the expression mentions, in first-mention order.
    pub fn fields(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_fields(&mut out);
        out
    }

    fn collect_fields(&self, out: &mut Vec<String>) {
        match self {
            ReqExpr::Field(f) => {
                if !out.contains(f) {
                    out.push(f.clone());
                }
            }
            ReqExpr::And(es) | ReqExpr::Or(es) => es.iter().for_each(|e| e.collect_fields(out)),
        }
    }

    pub fn to_expression_string(&self) -> String {
        match self {
            ReqExpr::Field(f) => f.clone(),
            ReqExpr::And(es) => es
                .iter()
                .map(Self::atom_string)
                .collect::<Vec<_>>()
                .join(" AND "),
            ReqExpr::Or(es) => es
                .iter()
                .map(|e| e.to_expression_string())
                .collect::<Vec<_>>()
                .join(" OR "),
        }
    }

    fn atom_string(e: &ReqExpr) -> String {
        match e {
            ReqExpr::Or(_) => format!("({})", e.to_expression_string()),
            _ => e.to_expression_string(),
        }
    }
}

#[derive(Debug, PartialEq)]
enum ExprToken {
    Field(String),
    And,
    Or,
    Open,
    Close,
}

fn lex_expr(input: &str) -> Result<Vec<ExprToken>, CompleteError> {
    let spaced = input.replace('(', " ( ").replace(')', " ) ");
    let mut tokens = Vec::new();
    for word in spaced.split_whitespace() {
        tokens.push(match word.to_lowercase().as_str() {
            "and" => ExprToken::And,
            "or" => ExprToken::Or,
            "(" => ExprToken::Open,
            ")" => ExprToken::Close,
            field if ENTITY_FIELDS.contains(&field) => ExprToken::Field(field.to_string()),
            other => {
                return Err(CompleteError::BadExpression {
                    expr: input.to_string(),
                    reason: format!("unknown field {other:?}"),
                })
            }
        });
    }
    Ok(tokens)
}

fn parse_or(tokens: &[ExprToken], pos: &mut usize, input: &str) -> Result<ReqExpr, CompleteError> {
    let mut parts = vec![parse_and(tokens, pos, input)?];
    while tokens.get(*pos) == Some(&ExprToken::Or) {
        *pos += 1;
        parts.push(parse_and(tokens, pos, input)?);
    }
    Ok(if parts.len() == 1 {
        parts.remove(0)
    } else {
        ReqExpr::Or(parts)
    })
}

fn parse_and(tokens: &[ExprToken], pos: &mut usize, input: &str) -> Result<ReqExpr, CompleteError> {
    let mut parts = vec![parse_atom(tokens, pos, input)?];
    while tokens.get(*pos) == Some(&ExprToken::And) {
        *pos += 1;
        parts.push(parse_atom(tokens, pos, input)?);
    }
    Ok(if parts.len() == 1 {
        parts.remove(0)
    } else {
        ReqExpr::And(parts)
    })
}

fn parse_atom(
    tokens: &[ExprToken],
    pos: &mut usize,
    input: &str,
) -> Result<ReqExpr, CompleteError> {
    let bad = |reason: &str| CompleteError::BadExpression {
        expr: input.to_string(),
        reason: reason.to_string(),
    };
    match tokens.get(*pos) {
        Some(ExprToken::Field(f)) => {
            *pos += 1;
            Ok(ReqExpr::Field(f.clone()))
        }
        Some(ExprToken::Open) => {
            *pos += 1;
            let inner = parse_or(tokens, pos, input)?;
            if tokens.get(*pos) != Some(&ExprToken::Close) {
                return Err(bad("missing closing parenthesis"));
            }
            *pos += 1;
            Ok(inner)
        }
        Some(_) => Err(bad("expected field or group")),
        None => Err(bad("expression ended early")),
    }
}

/// One requirement schema row.
#[derive(Debug, Clone)]
pub struct RequirementSchema {
    pub schema_id: String,
    /// Categories this schema serves; empty for the default and for schemas
    /// only reachable by id.
    pub applies_to: Vec<ComplaintCategory>,
    pub required: ReqExpr,
    pub is_default: bool,
}

/// All schemas plus prompt templates and field display names.
#[derive(Debug, Clone)]
pub struct SchemaSet {
    schemas: Vec<RequirementSchema>,
    /// field -> display name, in file order (which is render order).
    displays: Vec<(String, String)>,
    /// category name or "default" -> template with a `{fields}` placeholder.
    templates: BTreeMap<String, String>,
    pub version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CompleteError {
    #[error("cannot read schema file {path}: {source}")]
    FileUnreadable { path: String, source: io::Error },
    #[error("schema file line {line}: {reason}: {row:?}")]
    BadRow {
        line: usize,
        reason: String,
        row: String,
    },
    #[error("requirement expression {expr:?}: {reason}")]
    BadExpression { expr: String, reason: String },
    #[error("no default schema (applies_to = \"*\") is defined")]
    MissingDefaultSchema,
    #[error("duplicate schema id {0:?}")]
    DuplicateSchemaId(String),
    #[error("category {0:?} is claimed by more than one schema")]
    CategoryClaimedTwice(String),
    #[error("field {0:?} has no display name for prompts")]
    TemplateMissing(String),
    #[error("no default prompt template is defined")]
    MissingDefaultTemplate,
    #[error("prompt cannot be rendered for an empty missing-field list")]
    EmptyMissingSet,
    #[error("rendered prompt is {0} characters, limit is {MAX_PROMPT_CHARS}")]
    PromptTooLong(usize),
}

const SCHEMAS_FILE: &str = "schemas.tsv";
const PROMPTS_FILE: &str = "prompts.tsv";

impl SchemaSet {
    /// Load `schemas.tsv` and `prompts.tsv` from a directory.
    pub fn load_from_dir(dir: &Path) -> Result<SchemaSet, CompleteError> {
        let read = |name: &str| {
            tsv::read(&dir.join(name), |path, source| {
                CompleteError::FileUnreadable { path, source }
            })
        };
        SchemaSet::from_tables(&read(SCHEMAS_FILE)?, &read(PROMPTS_FILE)?)
    }

    pub fn from_tables(schemas_tsv: &str, prompts_tsv: &str) -> Result<SchemaSet, CompleteError> {
        let mut schemas: Vec<RequirementSchema> = Vec::new();
        let mut claimed: BTreeMap<ComplaintCategory, String> = BTreeMap::new();
        for (line, row) in tsv::rows(schemas_tsv) {
            let cols: Vec<&str> = row.split('\t').map(str::trim).collect();
            let [schema_id, applies, expr] = cols.as_slice() else {
                return Err(CompleteError::BadRow {
                    line,
                    reason: "expected schema_id, applies_to, expression".to_string(),
                    row: row.to_string(),
                });
            };
            if schemas.iter().any(|s| s.schema_id == *schema_id) {
                return Err(CompleteError::DuplicateSchemaId(schema_id.to_string()));
            }
            let is_default = *applies == "*";
            let applies_to = if is_default || *applies == "-" {
                Vec::new()
            } else {
                let mut categories = Vec::new();
                for name in applies.split(',').map(str::trim) {
                    let category =
                        ComplaintCategory::parse(name).ok_or_else(|| CompleteError::BadRow {
                            line,
                            reason: format!("unknown category {name:?}"),
                            row: row.to_string(),
                        })?;
                    if claimed.insert(category, schema_id.to_string()).is_some() {
                        return Err(CompleteError::CategoryClaimedTwice(name.to_string()));
                    }
                    categories.push(category);
                }
                categories
            };
            schemas.push(RequirementSchema {
                schema_id: schema_id.to_string(),
                applies_to,
                required: ReqExpr::parse(expr)?,
                is_default,
            });
        }
        if !schemas.iter().any(|s| s.is_default) {
            return Err(CompleteError::MissingDefaultSchema);
        }

        let mut displays: Vec<(String, String)> = Vec::new();
        let mut templates = BTreeMap::new();
        for (line, row) in tsv::rows(prompts_tsv) {
            let cols: Vec<&str> = row.split('\t').map(str::trim).collect();
            match cols.as_slice() {
                ["display", field, display] if !field.is_empty() && !display.is_empty() => {
                    displays.push((field.to_string(), display.to_string()));
                }
                ["template", scope, template] if template.contains("{fields}") => {
                    templates.insert(scope.to_string(), template.to_string());
                }
                _ => {
                    return Err(CompleteError::BadRow {
                        line,
                        reason: "expected display|template, key, value (templates need {fields})"
                            .to_string(),
                        row: row.to_string(),
                    })
                }
            }
        }
        if !templates.contains_key("default") {
            return Err(CompleteError::MissingDefaultTemplate);
        }
        // Every field any schema can ask for must be displayable.
        for schema in &schemas {
            for field in schema.required.fields() {
                if !displays.iter().any(|(f, _)| *f == field) {
                    return Err(CompleteError::TemplateMissing(field));
                }
            }
        }

        let version = tsv::content_version(&[&canonical(&schemas, &displays, &templates)]);
        Ok(SchemaSet {
            schemas,
            displays,
            templates,
            version,
        })
    }

    /// The schema used for a category: its claimant, or the default.
    pub fn schema_for(&self, category: Option<ComplaintCategory>) -> &RequirementSchema {
        category
            .and_then(|c| self.schemas.iter().find(|s| s.applies_to.contains(&c)))
            .unwrap_or_else(|| self.default_schema())
    }

    pub fn schema_by_id(&self, schema_id: &str) -> Option<&RequirementSchema> {
        self.schemas.iter().find(|s| s.schema_id == schema_id)
    }

    pub fn default_schema(&self) -> &RequirementSchema {
        self.schemas
            .iter()
            .find(|s| s.is_default)
            .expect("validated at load")
    }

    pub fn schemas(&self) -> &[RequirementSchema] {
        &self.schemas
    }

    pub fn display_name(&self, field: &str) -> Option<&str> {
        self.displays
            .iter()
            .find(|(f, _)| f == field)
            .map(|(_, d)| d.as_str())
    }

    fn display_rank(&self, field: &str) -> usize {
        self.displays
            .iter()
            .position(|(f, _)| f == field)
            .unwrap_or(usize::MAX)
    }

    fn template_for(&self, category: Option<ComplaintCategory>) -> &str {
        category
            .and_then(|c| self.templates.get(c.as_str()))
            .unwrap_or_else(|| &self.templates["default"])
    }
}

fn canonical(
    schemas: &[RequirementSchema],
    displays: &[(String, String)],
    templates: &BTreeMap<String, String>,
) -> String {
    let mut out = String::new();
    for s in schemas {
        let applies = if s.is_default {
            "*".to_string()
        } else if s.applies_to.is_empty() {
            "-".to_string()
        } else {
            s.applies_to
                .iter()
                .map(|c| c.as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            s.schema_id,
            applies,
            s.required.to_expression_string()
        ));
    }
    for (f, d) in displays {
        out.push_str(&format!("display\t{f}\t{d}\n"));
    }
    for (k, t) in templates {
        out.push_str(&format!("template\t{k}\t{t}\n"));
    }
    out
}

/// Completeness verdict for one tweet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletenessStatus {
    /// The schema's requirement is satisfied.
    Complete,
    /// Fields are missing; `missing` and `prompt` say which and how to ask.
    Incomplete,
    /// Completeness only applies to complaints.
    NotApplicable,
}

/// The full completeness result attached to a triaged tweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub status: CompletenessStatus,
    /// Schema that was applied; absent for non-complaints.
    pub schema_id: Option<String>,
    /// The cheapest set of fields that would complete the record, in the
    /// order the prompt asks for them. Empty unless status is Incomplete.
    pub missing: Vec<String>,
    /// Ready-to-send follow-up question. Present iff status is Incomplete.
    pub prompt: Option<String>,
}

impl CompletenessReport {
    pub fn not_applicable() -> CompletenessReport {
        CompletenessReport {
            status: CompletenessStatus::NotApplicable,
            schema_id: None,
            missing: Vec::new(),
            prompt: None,
        }
    }
}

/// Check a tweet's extracted fields against the schema for its category.
///
/// Non-complaints are [`CompletenessStatus::NotApplicable`]. For complaints,
/// the applicable schema is the one claiming the category, or the default.
pub fn validate_completeness(
    tweet_type: TweetType,
    category: Option<ComplaintCategory>,
    entities: &EntitySet,
    schemas: &SchemaSet,
) -> Result<CompletenessReport, CompleteError> {
    if tweet_type != TweetType::Complaint {
        return Ok(CompletenessReport::not_applicable());
    }
    let schema = schemas.schema_for(category);
    check_schema(schema, category, entities, schemas)
}

/// Like [`validate_completeness`] but pinning the schema by id, for callers
/// that want a stricter or looser contract than the category mapping.
pub fn validate_with_schema(
    schema_id: &str,
    category: Option<ComplaintCategory>,
    entities: &EntitySet,
    schemas: &SchemaSet,
) -> Result<CompletenessReport, CompleteError> {
    let schema = schemas
        .schema_by_id(schema_id)
        .ok_or_else(|| CompleteError::BadExpression {
            expr: schema_id.to_string(),
            reason: "no such schema".to_string(),
        })?;
    check_schema(schema, category, entities, schemas)
}

fn check_schema(
    schema: &RequirementSchema,
    category: Option<ComplaintCategory>,
    entities: &EntitySet,
    schemas: &SchemaSet,
) -> Result<CompletenessReport, CompleteError> {
    let populated: BTreeSet<&str> = entities.populated_fields().into_iter().collect();
    let schema_id = Some(schema.schema_id.clone());

    // Cheapest branch: fewest missing fields, earliest-written on ties.
    let branches = schema.required.branches();
    let mut best: Option<Vec<String>> = None;
    for branch in branches {
        let missing: Vec<String> = branch
            .iter()
            .filter(|f| !populated.contains(f.as_str()))
            .cloned()
            .collect();
        if best.as_ref().is_none_or(|b| missing.len() < b.len()) {
            best = Some(missing);
        }
    }
    let mut missing = best.expect("an expression always has at least one branch");

    if missing.is_empty() {
        debug_assert!(schema.required.satisfied_by(&populated));
        return Ok(CompletenessReport {
            status: CompletenessStatus::Complete,
            schema_id,
            missing: Vec::new(),
            prompt: None,
        });
    }
    missing.sort_by_key(|f| schemas.display_rank(f));
    let prompt = render_prompt(category, &missing, schemas)?;
    Ok(CompletenessReport {
        status: CompletenessStatus::Incomplete,
        schema_id,
        missing,
        prompt: Some(prompt),
    })
}

/// Render the follow-up question asking for `missing` fields.
///
/// Field order in the output follows the display table, the template comes
/// from the category (falling back to the default template), and the result
/// must fit in [`MAX_PROMPT_CHARS`].
pub fn render_prompt(
    category: Option<ComplaintCategory>,
    missing: &[String],
    schemas: &SchemaSet,
) -> Result<String, CompleteError> {
    if missing.is_empty() {
        return Err(CompleteError::EmptyMissingSet);
    }
    let mut ordered: Vec<&String> = missing.iter().collect();
    ordered.sort_by_key(|f| schemas.display_rank(f));
    let mut names = Vec::with_capacity(ordered.len());
    for field in ordered {
        let display = schemas
            .display_name(field)
            .ok_or_else(|| CompleteError::TemplateMissing(field.clone()))?;
        names.push(display);
    }
    let rendered = schemas
        .template_for(category)
        .replace("{fields}", &names.join(", "));
    let len = rendered.chars().count();
    if len > MAX_PROMPT_CHARS {
        return Err(CompleteError::PromptTooLong(len));
    }
    Ok(rendered)
}
