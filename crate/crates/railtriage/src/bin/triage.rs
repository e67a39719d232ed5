//! Command-line front end: batch triage, evaluation, and the HTTP service.
//!
//! Exit codes: 0 success, 1 configuration problem (bad flags or unloadable
//! tables), 2 I/O problem (unreadable input, unwritable output, unusable
//! store, unbindable address).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use railtriage::config::{ConfigPaths, PipelineConfig};
use railtriage::eval::evaluate_file;
use railtriage::pipeline::{BatchError, Pipeline};
use railtriage::server::{serve, AppState};
use railtriage::store::{TaskRecord, TaskStore};

#[derive(Debug, Parser)]
#[command(
    name = "triage",
    version,
    about = "Triage railway grievance posts into typed, routed tasks"
)]
struct Cli {
    #[command(flatten)]
    tables: TableArgs,
    /// Task store file (JSONL event log). `serve` always uses one
    /// (default tasks.jsonl); `run` persists complaint tasks only when
    /// this flag is given; `eval` never writes.
    #[arg(long, global = true, value_name = "FILE")]
    store: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for the built-in tables. Anything not given keeps the
/// embedded default.
#[derive(Debug, Args)]
struct TableArgs {
    /// Directory with polarity.tsv, cues.tsv, negators.tsv, prefix_labels.tsv
    #[arg(long, global = true, value_name = "DIR")]
    lexicon_dir: Option<PathBuf>,
    /// Station gazetteer TSV
    #[arg(long, global = true, value_name = "FILE")]
    stations: Option<PathBuf>,
    /// Directory with schemas.tsv and prompts.tsv
    #[arg(long, global = true, value_name = "DIR")]
    schemas: Option<PathBuf>,
    /// Category keyword TSV
    #[arg(long, global = true, value_name = "FILE")]
    categories: Option<PathBuf>,
    /// Directory with departments.tsv, trains.tsv, default_route.tsv
    #[arg(long, global = true, value_name = "DIR")]
    routes: Option<PathBuf>,
}

impl TableArgs {
    fn to_paths(&self) -> ConfigPaths {
        ConfigPaths {
            lexicon_dir: self.lexicon_dir.clone(),
            stations: self.stations.clone(),
            schemas_dir: self.schemas.clone(),
            categories: self.categories.clone(),
            routes_dir: self.routes.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Triage a JSONL corpus file into a JSONL results file
    Run {
        /// Input corpus (one tweet JSON object per line)
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Output file (one triage outcome per line, input order)
        #[arg(long, value_name = "FILE")]
        output: PathBuf,
        /// Print the run summary as JSON instead of a table
        #[arg(long)]
        summary_json: bool,
    },
    /// Serve the HTTP/JSON API
    Serve {
        /// Address to listen on
        #[arg(long, value_name = "HOST:PORT")]
        bind: String,
    },
    /// Score the pipeline against a gold-labeled corpus
    Eval {
        /// Labeled corpus (tweet JSON plus "label" and optional "category")
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
    },
}

/// A failure, sorted into the exit-code contract.
enum CliError {
    /// Exit 1: flags or tables are wrong; nothing was processed.
    Config(String),
    /// Exit 2: reading or writing data failed.
    Io(String),
}

impl From<railtriage::config::ConfigError> for CliError {
    fn from(e: railtriage::config::ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        // Usage errors are configuration errors under the exit-code
        // contract, so remap clap's default exit status.
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn open_store(path: &Path) -> Result<TaskStore, CliError> {
    TaskStore::open(path).map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = PipelineConfig::load(&cli.tables.to_paths())?;
    let pipeline = Pipeline::new(config);

    match cli.command {
        Command::Run {
            input,
            output,
            summary_json,
        } => {
            let store = cli.store.as_deref().map(open_store).transpose()?;
            let summary = pipeline
                .triage_batch_with(&input, &output, |outcome| {
                    let Some(store) = &store else { return Ok(()) };
                    if let Some(task) = outcome.as_result().and_then(TaskRecord::for_result) {
                        store.create(task)?;
                    }
                    Ok(())
                })
                .map_err(|e| match e {
                    BatchError::Input(inner) => CliError::Io(inner.to_string()),
                    other => CliError::Io(other.to_string()),
                })?;
            if summary_json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&summary).expect("summary serializes")
                );
            } else {
                print!("{}", summary.render_text());
            }
            Ok(())
        }
        Command::Serve { bind } => {
            let store_path = cli
                .store
                .clone()
                .unwrap_or_else(|| PathBuf::from("tasks.jsonl"));
            let store = open_store(&store_path)?;
            let state = Arc::new(AppState::new(pipeline, store));
            let runtime =
                tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
            runtime
                .block_on(serve(state, &bind))
                .map_err(|e| CliError::Io(e.to_string()))
        }
        Command::Eval { input } => {
            let report =
                evaluate_file(&input, &pipeline).map_err(|e| CliError::Io(e.to_string()))?;
            print!("{}", report.render_text());
            Ok(())
        }
    }
}
