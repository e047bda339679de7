//! The `pdqi` command.
//!
//! Exit codes: 0 on success, 1 on unexpected failure, 2 on a validation or
//! usage error.

mod report;

pub use report::render_stats;

use clap::{Args, Parser, Subcommand};
use pdqi_core::ingestion::{validate_dataset, ValidationOptions};
use pdqi_core::rubric::{ANCHOR_HIGH, ANCHOR_LOW};
use pdqi_core::{analytics, rubric, Engine, EngineError, LikertScore};
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Debug, Parser)]
#[command(
    name = "pdqi",
    version,
    about = "Blinded PDQI-9 evaluation of clinical notes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct DataDir {
    /// Directory holding datasets, sessions and evaluations.
    #[arg(long, env = "PDQI_DATA_DIR", default_value = "pdqi-data")]
    pub data_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP API (and the UI bundle, if given) until interrupted.
    Serve {
        #[arg(long, env = "PDQI_PORT", default_value_t = pdqi_server::DEFAULT_PORT)]
        port: u16,
        #[command(flatten)]
        data: DataDir,
        /// Directory with the built evaluator UI.
        #[arg(long, env = "PDQI_UI_DIR")]
        ui_dir: Option<PathBuf>,
    },
    /// Parse, validate and store a documents CSV.
    Ingest {
        file: PathBuf,
        #[command(flatten)]
        data: DataDir,
    },
    /// Write the results CSV.
    Export {
        #[command(flatten)]
        data: DataDir,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print summary statistics.
    Stats {
        #[command(flatten)]
        data: DataDir,
        /// Include perceived-origin groups, Welch t-test, ANOVA and origin accuracy.
        #[arg(long)]
        by_origin: bool,
        /// Include inter-rater agreement.
        #[arg(long)]
        kappa: bool,
        /// Also write the flat report CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Print the full report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print the nine criteria and the rating scale.
    DescribeRubric,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input or arguments; exit 2.
    User(String),
    /// Anything else; exit 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::User(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Storage(_) => CliError::Failure(e.to_string()),
            _ => CliError::User(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

/// Runs a parsed command and maps the outcome to an exit code.
pub fn main_with(cli: Cli) -> ExitCode {
    let stdout = io::stdout();
    match run(cli.command, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Serve { port, data, ui_dir } => serve(port, &data.data_dir, ui_dir, out),
        Command::Ingest { file, data } => ingest(&file, &data.data_dir, out),
        Command::Export { data, out: path } => export(&data.data_dir, path.as_deref(), out),
        Command::Stats {
            data,
            by_origin,
            kappa,
            csv,
            json,
        } => stats(&data.data_dir, by_origin, kappa, csv.as_deref(), json, out),
        Command::DescribeRubric => describe_rubric(out),
    }
}

/// A missing data directory is created only when its parent exists.
fn open_engine(dir: &Path) -> Result<Engine, CliError> {
    if !dir.is_dir() {
        let parent = match dir.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        if !parent.is_dir() {
            return Err(CliError::User(format!(
                "data directory {} does not exist and neither does its parent",
                dir.display()
            )));
        }
    }
    Engine::open(dir).map_err(|e| CliError::Failure(e.to_string()))
}

fn serve(
    port: u16,
    dir: &Path,
    ui_dir: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if let Some(ui) = &ui_dir {
        if !ui.is_dir() {
            return Err(CliError::User(format!(
                "UI directory {} does not exist",
                ui.display()
            )));
        }
    }
    let engine = Arc::new(open_engine(dir)?);
    let _ = tracing_subscriber::fmt().with_writer(io::stderr).try_init();
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = pdqi_server::bind(port).await.map_err(|e| {
            let msg = format!("cannot listen on port {port}: {e}");
            if e.kind() == io::ErrorKind::AddrInUse {
                CliError::User(msg)
            } else {
                CliError::Failure(msg)
            }
        })?;
        let addr = listener.local_addr()?;
        writeln!(out, "listening on http://{addr}")?;
        out.flush()?;
        pdqi_server::serve(listener, pdqi_server::router(engine, ui_dir)).await?;
        Ok(())
    })
}

fn ingest(file: &Path, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let content = std::fs::read(file)
        .map_err(|e| CliError::User(format!("cannot read {}: {e}", file.display())))?;
    let engine = open_engine(dir)?;
    let outcome = engine.ingest(&content)?;
    let dataset = &outcome.dataset;
    writeln!(out, "dataset {}", dataset.id)?;
    writeln!(out, "{} documents", dataset.documents.len())?;
    for w in &outcome.warnings {
        writeln!(out, "warning: {w}")?;
    }
    let report = validate_dataset(dataset, &ValidationOptions::default());
    for issue in &report.issues {
        writeln!(out, "warning: {}: {}", issue.filename, issue.kind)?;
    }
    writeln!(
        out,
        "{} warnings",
        outcome.warnings.len() + report.warning_count()
    )?;
    Ok(())
}

fn export(dir: &Path, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let engine = open_engine(dir)?;
    let bytes = engine.export_csv()?;
    match path {
        Some(p) => std::fs::write(p, &bytes)
            .map_err(|e| CliError::User(format!("cannot write {}: {e}", p.display())))?,
        None => out.write_all(&bytes)?,
    }
    Ok(())
}

fn stats(
    dir: &Path,
    by_origin: bool,
    kappa: bool,
    csv: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let engine = open_engine(dir)?;
    let summary = engine.summary()?;
    if json {
        serde_json::to_writer_pretty(&mut *out, &summary)
            .map_err(|e| CliError::Failure(e.to_string()))?;
        writeln!(out)?;
    } else {
        out.write_all(render_stats(&summary, by_origin, kappa).as_bytes())?;
    }
    if let Some(p) = csv {
        std::fs::write(p, analytics::report_csv(&summary))
            .map_err(|e| CliError::User(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn describe_rubric(out: &mut dyn Write) -> Result<(), CliError> {
    for c in rubric() {
        let form = if c.form_label != c.display_label {
            format!(" (shown as \"{}\")", c.form_label)
        } else {
            String::new()
        };
        writeln!(
            out,
            "{}. {} | {}{}: {}",
            c.ordinal,
            c.key.as_str(),
            c.display_label,
            form,
            c.description
        )?;
    }
    writeln!(
        out,
        "Scale: {} ({ANCHOR_LOW}) to {} ({ANCHOR_HIGH})",
        LikertScore::MIN,
        LikertScore::MAX
    )?;
    Ok(())
}
