//! Pipeline configuration: every table the engine needs, loaded together.
//!
//! A [`PipelineConfig`] is immutable once built; "reloading" means building
//! a new one and swapping it in. The builtin tables embedded at compile time
//! make the engine usable with zero setup, and any piece can be overridden
//! from disk independently.

use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::categorize::{CategorizeError, CategoryRuleSet};
use crate::complete::{CompleteError, SchemaSet};
use crate::extract::{ExtractError, Gazetteer};
use crate::lexicon::{Lexicon, LexiconError};
use crate::route::{RouteError, RoutingTables};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("lexicon: {0}")]
    Lexicon(#[from] LexiconError),
    #[error("stations: {0}")]
    Stations(#[from] ExtractError),
    #[error("categories: {0}")]
    Categories(#[from] CategorizeError),
    #[error("schemas: {0}")]
    Schemas(#[from] CompleteError),
    #[error("routes: {0}")]
    Routes(#[from] RouteError),
}

/// Optional on-disk overrides; anything left `None` uses the builtin table.
#[derive(Debug, Clone, Default)]
pub struct ConfigPaths {
    /// Directory holding polarity.tsv, cues.tsv, negators.tsv, prefix_labels.tsv.
    pub lexicon_dir: Option<PathBuf>,
    /// Station gazetteer file.
    pub stations: Option<PathBuf>,
    /// Directory holding schemas.tsv and prompts.tsv.
    pub schemas_dir: Option<PathBuf>,
    /// Category keyword taxonomy file.
    pub categories: Option<PathBuf>,
    /// Directory holding departments.tsv, trains.tsv, default_route.tsv.
    pub routes_dir: Option<PathBuf>,
}

/// Everything the triage pipeline consults, plus a version stamp that
/// changes whenever any table or the engine itself changes.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub lexicon: Lexicon,
    pub gazetteer: Gazetteer,
    pub categories: CategoryRuleSet,
    pub schemas: SchemaSet,
    pub routes: RoutingTables,
    pub version: String,
}

mod builtin {
    pub const POLARITY: &str = include_str!("../data/lexicon/polarity.tsv");
    pub const CUES: &str = include_str!("../data/lexicon/cues.tsv");
    pub const NEGATORS: &str = include_str!("../data/lexicon/negators.tsv");
    pub const PREFIX_LABELS: &str = include_str!("../data/lexicon/prefix_labels.tsv");
    pub const STATIONS: &str = include_str!("../data/stations.tsv");
    pub const CATEGORIES: &str = include_str!("../data/categories.tsv");
    pub const SCHEMAS: &str = include_str!("../data/schemas/schemas.tsv");
    pub const PROMPTS: &str = include_str!("../data/schemas/prompts.tsv");
    pub const DEPARTMENTS: &str = include_str!("../data/routes/departments.tsv");
    pub const TRAINS: &str = include_str!("../data/routes/trains.tsv");
    pub const DEFAULT_ROUTE: &str = include_str!("../data/routes/default_route.tsv");
}

impl PipelineConfig {
    /// The tables shipped inside the binary.
    pub fn builtin() -> PipelineConfig {
        PipelineConfig::load(&ConfigPaths::default()).expect("builtin tables are valid")
    }

    /// Build a config from `paths`, falling back to builtin tables for any
    /// piece not overridden.
    pub fn load(paths: &ConfigPaths) -> Result<PipelineConfig, ConfigError> {
        let lexicon = match &paths.lexicon_dir {
            Some(dir) => Lexicon::load_from_dir(dir)?,
            None => Lexicon::from_tables(
                builtin::POLARITY,
                builtin::CUES,
                builtin::NEGATORS,
                builtin::PREFIX_LABELS,
            )?,
        };
        let gazetteer = match &paths.stations {
            Some(file) => Gazetteer::load(file)?,
            None => Gazetteer::from_table(builtin::STATIONS)?,
        };
        let categories = match &paths.categories {
            Some(file) => CategoryRuleSet::load(file)?,
            None => CategoryRuleSet::from_table(builtin::CATEGORIES)?,
        };
        let schemas = match &paths.schemas_dir {
            Some(dir) => SchemaSet::load_from_dir(dir)?,
            None => SchemaSet::from_tables(builtin::SCHEMAS, builtin::PROMPTS)?,
        };
        let routes = match &paths.routes_dir {
            Some(dir) => RoutingTables::load_from_dir(dir)?,
            None => RoutingTables::from_tables(
                builtin::DEPARTMENTS,
                builtin::TRAINS,
                builtin::DEFAULT_ROUTE,
            )?,
        };

        let version = engine_version(&[
            &lexicon.version,
            &gazetteer.version,
            &categories.version,
            &schemas.version,
            &routes.version,
        ]);
        Ok(PipelineConfig {
            lexicon,
            gazetteer,
            categories,
            schemas,
            routes,
            version,
        })
    }
}

/// Combined version: the crate version plus every table version, hashed.
fn engine_version(table_versions: &[&str]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(env!("CARGO_PKG_VERSION").as_bytes());
    for v in table_versions {
        hasher.update(b"/");
        hasher.update(v.as_bytes());
    }
    let digest = hasher.finalize();
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    format!("{}+{}", env!("CARGO_PKG_VERSION"), hex)
}

/// Convenience re-export of the builtin station table for examples/tests
/// that want a realistic gazetteer without touching disk.
pub fn builtin_stations() -> &'static str {
    builtin::STATIONS
}
