//! Routing a categorized complaint to a zone, division, and department.
//!
//! The department comes from the category alone. The zone/division pair is
//! location-driven: an extracted station pins both exactly; failing that,
//! a known train maps to its operating division; failing both, the complaint
//! lands on the configured default desk for manual dispatch.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::categorize::ComplaintCategory;
use crate::extract::EntitySet;
use crate::tsv;

/// How sure the router is about the zone/division pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteConfidence {
    /// Location evidence (station or train) pinned the destination.
    Resolved,
    /// No location evidence; the default desk was used.
    Fallback,
}

/// Which evidence picked the zone/division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteBasis {
    Station,
    Train,
    CategoryDefault,
}

/// Where a complaint should go.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingAssignment {
    pub zone: String,
    pub division: String,
    pub department: String,
    pub confidence: RouteConfidence,
    pub basis: RouteBasis,
}

/// The three routing tables: category departments, train home divisions,
/// and the default desk.
#[derive(Debug, Clone)]
pub struct RoutingTables {
    departments: BTreeMap<ComplaintCategory, String>,
    /// train number -> (division, zone).
    trains: BTreeMap<String, (String, String)>,
    default_division: String,
    default_zone: String,
    pub version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum RouteError {
    #[error("cannot read routing table {path}: {source}")]
    FileUnreadable { path: String, source: io::Error },
    #[error("{file} line {line}: {reason}: {row:?}")]
    BadRow {
        file: &'static str,
        line: usize,
        reason: String,
        row: String,
    },
    #[error("department table has no row for category {0:?}")]
    MissingDepartment(&'static str),
    #[error("default route file must hold exactly one division/zone row")]
    MissingDefaultRoute,
}

const DEPARTMENTS_FILE: &str = "departments.tsv";
const TRAINS_FILE: &str = "trains.tsv";
const DEFAULT_FILE: &str = "default_route.tsv";

impl RoutingTables {
    /// Load `departments.tsv`, `trains.tsv`, and `default_route.tsv` from a
    /// directory.
    pub fn load_from_dir(dir: &Path) -> Result<RoutingTables, RouteError> {
        let read = |name: &str| {
            tsv::read(&dir.join(name), |path, source| RouteError::FileUnreadable {
                path,
                source,
            })
        };
        RoutingTables::from_tables(
            &read(DEPARTMENTS_FILE)?,
            &read(TRAINS_FILE)?,
            &read(DEFAULT_FILE)?,
        )
    }

    pub fn from_tables(
        departments_tsv: &str,
        trains_tsv: &str,
        default_tsv: &str,
    ) -> Result<RoutingTables, RouteError> {
        let mut departments = BTreeMap::new();
        for (line, row) in tsv::rows(departments_tsv) {
            let cols: Vec<&str> = row.split('\t').map(str::trim).collect();
            let [name, department] = cols.as_slice() else {
                return Err(RouteError::BadRow {
                    file: DEPARTMENTS_FILE,
                    line,
                    reason: "expected category, department".to_string(),
                    row: row.to_string(),
                });
            };
            let category = ComplaintCategory::parse(&name.to_lowercase()).ok_or_else(|| {
                RouteError::BadRow {
                    file: DEPARTMENTS_FILE,
                    line,
                    reason: format!("unknown category {name:?}"),
                    row: row.to_string(),
                }
            })?;
            departments.insert(category, department.to_string());
        }
        // The department map must be total: a complaint always has a
        // category and always needs a department.
        for category in ComplaintCategory::ALL {
            if !departments.contains_key(&category) {
                return Err(RouteError::MissingDepartment(category.as_str()));
            }
        }

        let mut trains = BTreeMap::new();
        for (line, row) in tsv::rows(trains_tsv) {
            let cols: Vec<&str> = row.split('\t').map(str::trim).collect();
            let [train_no, division, zone] = cols.as_slice() else {
                return Err(RouteError::BadRow {
                    file: TRAINS_FILE,
                    line,
                    reason: "expected train_no, division, zone".to_string(),
                    row: row.to_string(),
                });
            };
            if train_no.is_empty() || !train_no.chars().all(|c| c.is_ascii_digit()) {
                return Err(RouteError::BadRow {
                    file: TRAINS_FILE,
                    line,
                    reason: format!("train number must be digits, got {train_no:?}"),
                    row: row.to_string(),
                });
            }
            trains.insert(
                train_no.to_string(),
                (division.to_uppercase(), zone.to_uppercase()),
            );
        }

        let mut default = None;
        for (line, row) in tsv::rows(default_tsv) {
            let cols: Vec<&str> = row.split('\t').map(str::trim).collect();
            let [zone, division] = cols.as_slice() else {
                return Err(RouteError::BadRow {
                    file: DEFAULT_FILE,
                    line,
                    reason: "expected zone, division".to_string(),
                    row: row.to_string(),
                });
            };
            if default.is_some() {
                return Err(RouteError::MissingDefaultRoute);
            }
            default = Some((division.to_uppercase(), zone.to_uppercase()));
        }
        let (default_division, default_zone) = default.ok_or(RouteError::MissingDefaultRoute)?;

        let version = tsv::content_version(&[&canonical(
            &departments,
            &trains,
            &default_division,
            &default_zone,
        )]);
        Ok(RoutingTables {
            departments,
            trains,
            default_division,
            default_zone,
            version,
        })
    }

    pub fn department_of(&self, category: ComplaintCategory) -> &str {
        &self.departments[&category]
    }

    /// The (zone, division) desk for complaints no table can localize.
    pub fn default_desk(&self) -> (&str, &str) {
        (&self.default_zone, &self.default_division)
    }

    pub fn train_route(&self, train_no: &str) -> Option<(&str, &str)> {
        self.trains
            .get(train_no)
            .map(|(d, z)| (d.as_str(), z.as_str()))
    }
}

fn canonical(
    departments: &BTreeMap<ComplaintCategory, String>,
    trains: &BTreeMap<String, (String, String)>,
    default_division: &str,
    default_zone: &str,
) -> String {
    let mut out = String::new();
    for (c, d) in departments {
        out.push_str(&format!("{}\t{}\n", c.as_str(), d));
    }
    for (t, (d, z)) in trains {
        out.push_str(&format!("{t}\t{d}\t{z}\n"));
    }
    out.push_str(&format!("{default_zone}\t{default_division}\n"));
    out
}

/// Route one categorized complaint. Total: every category and entity
/// combination produces an assignment.
pub fn route(
    category: ComplaintCategory,
    entities: &EntitySet,
    tables: &RoutingTables,
) -> RoutingAssignment {
    let department = tables.department_of(category).to_string();
    if let Some(station) = &entities.station {
        return RoutingAssignment {
            zone: station.zone.clone(),
            division: station.division.clone(),
            department,
            confidence: RouteConfidence::Resolved,
            basis: RouteBasis::Station,
        };
    }
    if let Some((division, zone)) = entities
        .train_no
        .as_deref()
        .and_then(|t| tables.train_route(t))
    {
        return RoutingAssignment {
            zone: zone.to_string(),
            division: division.to_string(),
            department,
            confidence: RouteConfidence::Resolved,
            basis: RouteBasis::Train,
        };
    }
    RoutingAssignment {
        zone: tables.default_zone.clone(),
        division: tables.default_division.clone(),
        department,
        confidence: RouteConfidence::Fallback,
        basis: RouteBasis::CategoryDefault,
    }
}
