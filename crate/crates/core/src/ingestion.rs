//! Parsing the note corpus CSV into a [`Dataset`].
//!
//! Required columns (matched case-insensitively, in any order): `filename`,
//! `description`, `mrn` (alias `medical_record_number`) and `note` (aliases
//! `note_text`, `text`). An optional `true_origin` column carries the ground
//! truth authorship; it is kept on the [`Document`] but never leaves the
//! analysis side of the system.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use chrono::{DateTime, Utc};
use serde::Serialize;
use thiserror::Error;

use crate::csvio::{Reader, SyntaxError};
use crate::rubric::Origin;

/// Hidden authorship label from the source file.
///
/// The source text is kept verbatim so datasets round-trip through storage.
/// `Debug` is redacted.
#[derive(Clone, PartialEq, Eq)]
pub struct GroundTruth {
    raw: String,
}

impl GroundTruth {
    pub fn new(raw: impl Into<String>) -> Self {
        GroundTruth { raw: raw.into() }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    /// `Human` or `Ai` when the label is recognized.
    pub fn origin(&self) -> Option<Origin> {
        match self.raw.trim().to_ascii_lowercase().as_str() {
            "human" => Some(Origin::Human),
            "ai" => Some(Origin::Ai),
            _ => None,
        }
    }
}

impl fmt::Debug for GroundTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GroundTruth(..)")
    }
}

/// One clinical note.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub filename: String,
    pub description: String,
    pub mrn: String,
    pub note_text: String,
    pub true_origin: Option<GroundTruth>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub id: String,
    pub documents: Vec<Document>,
    pub ingested_at: DateTime<Utc>,
}

impl Dataset {
    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn document_by_filename(&self, filename: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.filename == filename)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("file is empty")]
    EmptyFile,
    #[error("file is not valid UTF-8 (first invalid byte at offset {offset})")]
    InvalidEncoding { offset: usize },
    #[error("header is missing required column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: note text is empty")]
    EmptyNote { row: usize },
    #[error("row {row}: filename is empty")]
    EmptyFilename { row: usize },
    #[error("duplicate filename `{name}` on rows {}", join_rows(.rows))]
    DuplicateFilename { name: String, rows: Vec<usize> },
    #[error("row {row}: malformed CSV: {detail}")]
    MalformedCsv { row: usize, detail: String },
}

fn join_rows(rows: &[usize]) -> String {
    rows.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl IngestError {
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::EmptyFile => "empty_file",
            IngestError::InvalidEncoding { .. } => "invalid_encoding",
            IngestError::MissingColumn(_) => "missing_column",
            IngestError::EmptyNote { .. } => "empty_note",
            IngestError::EmptyFilename { .. } => "empty_filename",
            IngestError::DuplicateFilename { .. } => "duplicate_filename",
            IngestError::MalformedCsv { .. } => "malformed_csv",
        }
    }

    /// Source rows implicated in the error (header is row 1).
    pub fn rows(&self) -> Vec<usize> {
        match self {
            IngestError::EmptyNote { row }
            | IngestError::EmptyFilename { row }
            | IngestError::MalformedCsv { row, .. } => vec![*row],
            IngestError::DuplicateFilename { rows, .. } => rows.clone(),
            _ => Vec::new(),
        }
    }
}

impl From<SyntaxError> for IngestError {
    fn from(e: SyntaxError) -> Self {
        let detail = match e {
            SyntaxError::UnterminatedQuote { .. } => "unterminated quoted field",
            SyntaxError::TextAfterQuote { .. } => "unexpected character after closing quote",
        };
        IngestError::MalformedCsv {
            row: e.row(),
            detail: detail.to_string(),
        }
    }
}

/// Non-fatal findings from parsing. None of them echo ground-truth values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IngestWarning {
    UnknownColumn { name: String },
    DuplicateColumn { name: String },
    NoDocuments,
    UnrecognizedTrueOrigin { row: usize },
}

impl fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestWarning::UnknownColumn { name } => write!(f, "ignored unknown column `{name}`"),
            IngestWarning::DuplicateColumn { name } => {
                write!(f, "column `{name}` appears more than once; using the first")
            }
            IngestWarning::NoDocuments => f.write_str("file contains no documents"),
            IngestWarning::UnrecognizedTrueOrigin { row } => write!(
                f,
                "row {row}: true_origin is not `human` or `ai`; excluded from discrimination analysis"
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedDataset {
    pub dataset: Dataset,
    pub warnings: Vec<IngestWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Column {
    Filename,
    Description,
    Mrn,
    Note,
    TrueOrigin,
}

impl Column {
    const REQUIRED: [Column; 4] = [
        Column::Filename,
        Column::Description,
        Column::Mrn,
        Column::Note,
    ];

    fn from_header(name: &str) -> Option<Column> {
        match name.trim().to_ascii_lowercase().as_str() {
            "filename" => Some(Column::Filename),
            "description" => Some(Column::Description),
            "mrn" | "medical_record_number" => Some(Column::Mrn),
            "note" | "note_text" | "text" => Some(Column::Note),
            "true_origin" => Some(Column::TrueOrigin),
            _ => None,
        }
    }

    fn canonical(self) -> &'static str {
        match self {
            Column::Filename => "filename",
            Column::Description => "description",
            Column::Mrn => "mrn",
            Column::Note => "note",
            Column::TrueOrigin => "true_origin",
        }
    }
}

fn new_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

/// Parses an uploaded corpus. A leading UTF-8 byte-order mark is stripped.
pub fn parse_documents_csv(content: &[u8]) -> Result<ParsedDataset, IngestError> {
    let content = content.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(content);
    let text = std::str::from_utf8(content).map_err(|e| IngestError::InvalidEncoding {
        offset: e.valid_up_to(),
    })?;
    if text.trim().is_empty() {
        return Err(IngestError::EmptyFile);
    }

    let mut records = Reader::new(text);
    let header = match records.next() {
        Some(rec) => rec?,
        None => return Err(IngestError::EmptyFile),
    };

    let mut warnings = Vec::new();
    let mut columns: BTreeMap<Column, usize> = BTreeMap::new();
    for (idx, name) in header.fields.iter().enumerate() {
        match Column::from_header(name) {
            Some(col) if columns.contains_key(&col) => {
                warnings.push(IngestWarning::DuplicateColumn {
                    name: name.trim().to_string(),
                })
            }
            Some(col) => {
                columns.insert(col, idx);
            }
            None => warnings.push(IngestWarning::UnknownColumn {
                name: name.trim().to_string(),
            }),
        }
    }
    if let Some(missing) = Column::REQUIRED.iter().find(|c| !columns.contains_key(c)) {
        return Err(IngestError::MissingColumn(missing.canonical().to_string()));
    }
    let width = header.fields.len();
    let col = |c: Column| columns[&c];

    let mut documents = Vec::new();
    let mut rows_by_name: HashMap<String, Vec<usize>> = HashMap::new();
    let mut name_order = Vec::new();
    for rec in records {
        let rec = rec?;
        if rec.fields.len() != width {
            return Err(IngestError::MalformedCsv {
                row: rec.row,
                detail: format!("expected {width} fields, found {}", rec.fields.len()),
            });
        }
        let mut fields = rec.fields;
        let mut take = |c: Column| std::mem::take(&mut fields[col(c)]);
        let filename = take(Column::Filename);
        let description = take(Column::Description);
        let mrn = take(Column::Mrn);
        let note_text = take(Column::Note);
        let true_origin = columns
            .contains_key(&Column::TrueOrigin)
            .then(|| take(Column::TrueOrigin))
            .filter(|v| !v.trim().is_empty())
            .map(GroundTruth::new);

        if filename.trim().is_empty() {
            return Err(IngestError::EmptyFilename { row: rec.row });
        }
        if note_text.trim().is_empty() {
            return Err(IngestError::EmptyNote { row: rec.row });
        }
        if matches!(&true_origin, Some(gt) if gt.origin().is_none()) {
            warnings.push(IngestWarning::UnrecognizedTrueOrigin { row: rec.row });
        }
        let rows = rows_by_name.entry(filename.clone()).or_default();
        if rows.is_empty() {
            name_order.push(filename.clone());
        }
        rows.push(rec.row);

        documents.push(Document {
            id: new_id(),
            filename,
            description,
            mrn,
            note_text,
            true_origin,
        });
    }

    if let Some(name) = name_order.iter().find(|n| rows_by_name[*n].len() > 1) {
        return Err(IngestError::DuplicateFilename {
            name: name.clone(),
            rows: rows_by_name[name].clone(),
        });
    }
    if documents.is_empty() {
        warnings.push(IngestWarning::NoDocuments);
    }

    Ok(ParsedDataset {
        dataset: Dataset {
            id: new_id(),
            documents,
            ingested_at: crate::now_seconds(),
        },
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    MissingDescription,
    MissingMrn,
    ShortNote { chars: usize, min: usize },
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IssueKind::MissingDescription => f.write_str("missing description"),
            IssueKind::MissingMrn => f.write_str("missing MRN"),
            IssueKind::ShortNote { chars, min } => {
                write!(f, "note is {chars} characters, shorter than {min}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentIssue {
    pub filename: String,
    pub severity: Severity,
    #[serde(flatten)]
    pub kind: IssueKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Notes with fewer characters (after trimming) get a warning.
    pub min_note_chars: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { min_note_chars: 20 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<DocumentIssue>,
}

impl ValidationReport {
    pub fn counts(&self) -> BTreeMap<Severity, usize> {
        let mut counts = BTreeMap::from([(Severity::Warning, 0)]);
        for issue in &self.issues {
            *counts.entry(issue.severity).or_default() += 1;
        }
        counts
    }

    pub fn warning_count(&self) -> usize {
        self.counts()[&Severity::Warning]
    }
}

/// Metadata quality checks. Everything reported here is a warning.
pub fn validate_dataset(dataset: &Dataset, options: &ValidationOptions) -> ValidationReport {
    let mut issues = Vec::new();
    for doc in &dataset.documents {
        let mut push = |kind| {
            issues.push(DocumentIssue {
                filename: doc.filename.clone(),
                severity: Severity::Warning,
                kind,
            })
        };
        if doc.description.trim().is_empty() {
            push(IssueKind::MissingDescription);
        }
        if doc.mrn.trim().is_empty() {
            push(IssueKind::MissingMrn);
        }
        let chars = doc.note_text.trim().chars().count();
        if chars < options.min_note_chars {
            push(IssueKind::ShortNote {
                chars,
                min: options.min_note_chars,
            });
        }
    }
    ValidationReport { issues }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE_NOTE: &str = "Patient is a 57-year-old male with history of hypertension, type 2 diabetes, and hyperlipidemia presenting for routine follow-up. BP today is 138/82, weight stable at 87kg. A1c improved from 7.8 to 7.2.";

    fn parse(s: &str) -> Result<ParsedDataset, IngestError> {
        parse_documents_csv(s.as_bytes())
    }

    #[test]
    fn sample_row_is_carried_verbatim() {
        let csv = format!(
            "filename,description,mrn,note\nvisit1.txt,Primary Care Follow-up Visit,MRN12345678,\"{SAMPLE_NOTE}\"\n"
        );
        let parsed = parse(&csv).unwrap();
        let doc = &parsed.dataset.documents[0];
        assert_eq!(doc.filename, "visit1.txt");
        assert_eq!(doc.description, "Primary Care Follow-up Visit");
        assert_eq!(doc.mrn, "MRN12345678");
        assert_eq!(doc.note_text, SAMPLE_NOTE);
        assert!(doc.true_origin.is_none());
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn header_only_gives_empty_dataset_with_warning() {
        let parsed = parse("filename,description,mrn,note\r\n").unwrap();
        assert!(parsed.dataset.documents.is_empty());
        assert_eq!(parsed.warnings, vec![IngestWarning::NoDocuments]);
    }

    #[test]
    fn bom_aliases_and_case_insensitive_headers() {
        let csv = "\u{feff}FileName,Description,Medical_Record_Number,Note_Text,extra\na,b,c,d,e\n";
        let parsed = parse(csv).unwrap();
        assert_eq!(parsed.dataset.documents[0].mrn, "c");
        assert_eq!(parsed.dataset.documents[0].note_text, "d");
        assert_eq!(
            parsed.warnings,
            vec![IngestWarning::UnknownColumn {
                name: "extra".into()
            }]
        );
    }

    #[test]
    fn columns_in_any_order() {
        let parsed = parse("note,mrn,filename,description\nhello there,M1,f.txt,desc\n").unwrap();
        let d = &parsed.dataset.documents[0];
        assert_eq!(
            (d.filename.as_str(), d.note_text.as_str()),
            ("f.txt", "hello there")
        );
    }

    #[test]
    fn missing_column() {
        let err = parse("filename,description,mrn\na,b,c\n").unwrap_err();
        assert_eq!(err, IngestError::MissingColumn("note".into()));
        assert_eq!(err.code(), "missing_column");
    }

    #[test]
    fn empty_file_variants() {
        assert_eq!(parse("").unwrap_err(), IngestError::EmptyFile);
        assert_eq!(parse("\u{feff}\n\n").unwrap_err(), IngestError::EmptyFile);
    }

    #[test]
    fn invalid_utf8_rejected() {
        let err = parse_documents_csv(b"filename,description,mrn,note\na,b,c,\xff\n").unwrap_err();
        assert!(matches!(err, IngestError::InvalidEncoding { offset: 36 }));
    }

    #[test]
    fn empty_note_is_error() {
        let err = parse("filename,description,mrn,note\na,b,c,x\nb,b,c,\"  \"\n").unwrap_err();
        assert_eq!(err, IngestError::EmptyNote { row: 3 });
    }

    #[test]
    fn duplicate_filename_lists_rows() {
        let err = parse("filename,description,mrn,note\na,,,x\nb,,,y\na,,,z\n").unwrap_err();
        assert_eq!(
            err,
            IngestError::DuplicateFilename {
                name: "a".into(),
                rows: vec![2, 4]
            }
        );
        assert_eq!(err.to_string(), "duplicate filename `a` on rows 2, 4");
    }

    #[test]
    fn ragged_and_unbalanced_rows() {
        let err = parse("filename,description,mrn,note\na,b,c\n").unwrap_err();
        assert!(matches!(err, IngestError::MalformedCsv { row: 2, .. }));
        let err = parse("filename,description,mrn,note\na,b,c,\"open\n").unwrap_err();
        assert_eq!(
            err,
            IngestError::MalformedCsv {
                row: 2,
                detail: "unterminated quoted field".into()
            }
        );
    }

    #[test]
    fn true_origin_kept_and_recognized() {
        let parsed = parse(
            "filename,description,mrn,note,true_origin\na,,,x,Human\nb,,,y,AI\nc,,,z,\nd,,,w,robot\n",
        )
        .unwrap();
        let docs = &parsed.dataset.documents;
        assert_eq!(
            docs[0].true_origin.as_ref().unwrap().origin(),
            Some(Origin::Human)
        );
        assert_eq!(
            docs[1].true_origin.as_ref().unwrap().origin(),
            Some(Origin::Ai)
        );
        assert!(docs[2].true_origin.is_none());
        assert_eq!(docs[3].true_origin.as_ref().unwrap().raw(), "robot");
        assert_eq!(
            parsed.warnings,
            vec![IngestWarning::UnrecognizedTrueOrigin { row: 5 }]
        );
        assert!(!format!("{:?}", docs[3]).contains("robot"));
    }

    #[test]
    fn validation_warnings() {
        let csv = format!(
            "filename,description,mrn,note\na,desc,M1,\"{SAMPLE_NOTE}\"\nb,desc,,\"{SAMPLE_NOTE}\"\nc,,M3,short\n"
        );
        let ds = parse(&csv).unwrap().dataset;
        let report = validate_dataset(&ds, &ValidationOptions::default());
        let kinds: Vec<_> = report
            .issues
            .iter()
            .map(|i| (i.filename.as_str(), i.kind.to_string()))
            .collect();
        assert_eq!(
            kinds,
            vec![
                ("b", "missing MRN".to_string()),
                ("c", "missing description".to_string()),
                ("c", "note is 5 characters, shorter than 20".to_string()),
            ]
        );
        assert_eq!(report.warning_count(), 3);
    }

    #[test]
    fn fully_populated_has_no_warnings() {
        let csv = format!(
            "filename,description,mrn,note\na,d,M1,\"{SAMPLE_NOTE}\"\nb,d,M2,\"{SAMPLE_NOTE}\"\nc,d,M3,\"{SAMPLE_NOTE}\"\n"
        );
        let ds = parse(&csv).unwrap().dataset;
        assert_eq!(
            validate_dataset(&ds, &ValidationOptions::default()).warning_count(),
            0
        );
    }
}
