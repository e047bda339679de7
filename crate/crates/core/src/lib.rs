//! Blinded PDQI-9 evaluation of clinical notes.
//!
//! The crate is organized bottom-up:
//!
//! - [`rubric`]: the nine criteria, Likert scale, origin categories and score validation.
//! - [`csvio`]: the RFC 4180 reader/writer shared by ingestion and storage.
//! - [`ingestion`]: parsing and checking uploaded note corpora.
//! - [`persistence`]: the CSV-backed store and the results export.
//! - [`engine`]: evaluator sessions, ordering, progress and submission.
//! - [`analytics`]: summaries, Welch t, one-way ANOVA, weighted kappa, origin confusion.
//! - [`stats`]: special functions behind the p-values.

pub mod analytics;
pub mod csvio;
pub mod engine;
pub mod ingestion;
pub mod persistence;
pub mod rubric;
pub mod stats;

use chrono::{DateTime, SecondsFormat, Utc};

pub use analytics::{summary_report, SummaryReport};
pub use engine::{Clock, DocumentView, Engine, EngineError, NextDocument, Progress, SystemClock};
pub use ingestion::{parse_documents_csv, Dataset, Document, GroundTruth, IngestError};
pub use persistence::{EvaluationRecord, StorageFailure, Store, EXPORT_HEADER};
pub use rubric::{
    rubric, total_score, validate_scores, CriterionKey, Evaluation, LikertScore, Origin,
    RubricCriterion, ScoreErrors, ScoreIssue, Scores,
};

/// Current time truncated to whole seconds, the precision everything is stored at.
pub fn now_seconds() -> DateTime<Utc> {
    truncate_seconds(Utc::now())
}

pub fn truncate_seconds(ts: DateTime<Utc>) -> DateTime<Utc> {
    DateTime::from_timestamp(ts.timestamp(), 0).expect("in-range timestamp")
}

/// `2025-03-07T12:00:00Z`
pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s)
        .ok()
        .map(|t| t.with_timezone(&Utc))
}
