//! CSV-backed storage under one data directory.
//!
//! ```text
//! <data-dir>/
//!   datasets.csv          dataset_id,ingested_at,document_count   (append-only index)
//!   datasets/<id>.csv     document_id,filename,description,mrn,note,true_origin
//!   sessions.csv          session_id,evaluator_name,dataset_id,created_at,shuffle_seed,document_order
//!   evaluations.csv       export layout + session_id,dataset_id   (append-only)
//! ```
//!
//! Evaluations are never rewritten. Replacement (one effective record per
//! evaluator and document, latest wins) happens when reading. Each append is
//! a single write followed by `sync_data`; a torn final row left by a crash
//! is cut off the next time the store is opened.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use chrono::{DateTime, Utc};
use thiserror::Error;
use tracing::warn;

use crate::csvio::{write_record, Reader, SyntaxError};
use crate::ingestion::{Dataset, Document, GroundTruth};
use crate::rubric::{validate_scores, CriterionKey, Evaluation, Origin};
use crate::{format_timestamp, parse_timestamp};

/// Header of the results export, in column order.
pub const EXPORT_HEADER: [&str; 16] = [
    "filename",
    "description",
    "mrn",
    "evaluator",
    "timestamp",
    "up_to_date",
    "accurate",
    "thorough",
    "useful",
    "organized",
    "comprehensible",
    "succinct",
    "synthesized",
    "internally_consistent",
    "total_score",
    "origin_assessment",
];

const EVALUATIONS_FILE: &str = "evaluations.csv";
const SESSIONS_FILE: &str = "sessions.csv";
const DATASET_INDEX_FILE: &str = "datasets.csv";
const DATASETS_DIR: &str = "datasets";

const SESSION_HEADER: [&str; 6] = [
    "session_id",
    "evaluator_name",
    "dataset_id",
    "created_at",
    "shuffle_seed",
    "document_order",
];
const DATASET_INDEX_HEADER: [&str; 3] = ["dataset_id", "ingested_at", "document_count"];
const DATASET_HEADER: [&str; 6] = [
    "document_id",
    "filename",
    "description",
    "mrn",
    "note",
    "true_origin",
];

fn evaluation_header() -> impl Iterator<Item = &'static str> {
    EXPORT_HEADER
        .into_iter()
        .chain(["session_id", "dataset_id"])
}

#[derive(Debug, Error)]
#[error("storage failure: {context}: {source}")]
pub struct StorageFailure {
    context: String,
    #[source]
    source: io::Error,
}

impl StorageFailure {
    fn new(context: impl Into<String>, source: io::Error) -> Self {
        StorageFailure {
            context: context.into(),
            source,
        }
    }
}

trait IoContext<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T, StorageFailure>;
}

impl<T> IoContext<T> for io::Result<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T, StorageFailure> {
        self.map_err(|e| StorageFailure::new(context(), e))
    }
}

/// A row that could not be read and was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorruptRow {
    pub file: &'static str,
    pub row: usize,
    pub detail: String,
}

/// An evaluation together with the document metadata it is reported with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationRecord {
    pub evaluation: Evaluation,
    pub session_id: String,
    pub dataset_id: String,
    pub filename: String,
    pub description: String,
    pub mrn: String,
}

impl EvaluationRecord {
    pub fn new(
        evaluation: Evaluation,
        session_id: impl Into<String>,
        dataset_id: impl Into<String>,
        document: &Document,
    ) -> Self {
        EvaluationRecord {
            evaluation,
            session_id: session_id.into(),
            dataset_id: dataset_id.into(),
            filename: document.filename.clone(),
            description: document.description.clone(),
            mrn: document.mrn.clone(),
        }
    }

    /// Values in [`EXPORT_HEADER`] order.
    pub fn export_fields(&self) -> Vec<String> {
        let e = &self.evaluation;
        let mut out = vec![
            self.filename.clone(),
            self.description.clone(),
            self.mrn.clone(),
            e.evaluator_name.clone(),
            format_timestamp(&e.timestamp),
        ];
        out.extend(e.scores.values().iter().map(ToString::to_string));
        out.push(e.total_score().to_string());
        out.push(e.origin.as_str().to_string());
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub records: Vec<EvaluationRecord>,
    pub corrupt: Vec<CorruptRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionRecord {
    pub session_id: String,
    pub evaluator_name: String,
    pub dataset_id: String,
    pub created_at: DateTime<Utc>,
    pub shuffle_seed: Option<u64>,
    pub document_order: Vec<String>,
}

pub struct Store {
    dir: PathBuf,
    /// Appends take this exclusively; readers share it.
    files: RwLock<()>,
    datasets: RwLock<HashMap<String, Arc<Dataset>>>,
}

impl Store {
    /// Opens (or initializes) a store. A missing data directory is created
    /// only if its parent exists.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StorageFailure> {
        let dir = dir.as_ref().to_path_buf();
        if !dir.is_dir() {
            fs::create_dir(&dir)
                .context(|| format!("creating data directory {}", dir.display()))?;
        }
        let datasets_dir = dir.join(DATASETS_DIR);
        if !datasets_dir.is_dir() {
            fs::create_dir(&datasets_dir)
                .context(|| format!("creating {}", datasets_dir.display()))?;
        }
        let store = Store {
            dir,
            files: RwLock::new(()),
            datasets: RwLock::new(HashMap::new()),
        };
        store.init_log(EVALUATIONS_FILE, evaluation_header())?;
        store.init_log(SESSIONS_FILE, SESSION_HEADER)?;
        store.init_log(DATASET_INDEX_FILE, DATASET_INDEX_HEADER)?;
        store.load_datasets()?;
        Ok(store)
    }

    pub fn data_dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn init_log<I, S>(&self, name: &str, header: I) -> Result<(), StorageFailure>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let path = self.path(name);
        if path.exists() {
            repair_tail(&path)?;
        }
        let empty = fs::metadata(&path).map(|m| m.len() == 0).unwrap_or(true);
        if empty {
            let mut buf = Vec::new();
            write_record(&mut buf, header).expect("write to vec");
            fs::write(&path, buf).context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }

    fn append(&self, name: &str, fields: &[String]) -> Result<(), StorageFailure> {
        let mut buf = Vec::new();
        write_record(&mut buf, fields).expect("write to vec");
        let path = self.path(name);
        let _guard = self.files.write().unwrap_or_else(|e| e.into_inner());
        let mut file = OpenOptions::new()
            .append(true)
            .create(true)
            .open(&path)
            .context(|| format!("opening {}", path.display()))?;
        file.write_all(&buf)
            .and_then(|_| file.sync_data())
            .context(|| format!("appending to {}", path.display()))
    }

    fn read_log(&self, name: &str) -> Result<String, StorageFailure> {
        let path = self.path(name);
        let _guard = self.files.read().unwrap_or_else(|e| e.into_inner());
        let bytes = fs::read(&path).context(|| format!("reading {}", path.display()))?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }

    // Datasets

    /// Persists a parsed dataset and makes it available by id.
    pub fn save_dataset(&self, dataset: Dataset) -> Result<Arc<Dataset>, StorageFailure> {
        let mut buf = Vec::new();
        write_record(&mut buf, DATASET_HEADER).expect("write to vec");
        for d in &dataset.documents {
            let truth = d.true_origin.as_ref().map(GroundTruth::raw).unwrap_or("");
            write_record(
                &mut buf,
                [&d.id, &d.filename, &d.description, &d.mrn, &d.note_text]
                    .map(String::as_str)
                    .into_iter()
                    .chain([truth]),
            )
            .expect("write to vec");
        }
        let final_path = self.dataset_path(&dataset.id);
        let tmp = final_path.with_extension("csv.tmp");
        write_synced(&tmp, &buf)?;
        fs::rename(&tmp, &final_path).context(|| format!("renaming {}", tmp.display()))?;

        self.append(
            DATASET_INDEX_FILE,
            &[
                dataset.id.clone(),
                format_timestamp(&dataset.ingested_at),
                dataset.documents.len().to_string(),
            ],
        )?;
        let dataset = Arc::new(dataset);
        self.datasets
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(dataset.id.clone(), Arc::clone(&dataset));
        Ok(dataset)
    }

    pub fn dataset(&self, id: &str) -> Option<Arc<Dataset>> {
        self.datasets
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
    }

    pub fn datasets(&self) -> Vec<Arc<Dataset>> {
        let mut all: Vec<_> = self
            .datasets
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .values()
            .cloned()
            .collect();
        all.sort_by(|a, b| (a.ingested_at, &a.id).cmp(&(b.ingested_at, &b.id)));
        all
    }

    fn dataset_path(&self, id: &str) -> PathBuf {
        self.dir.join(DATASETS_DIR).join(format!("{id}.csv"))
    }

    fn load_datasets(&self) -> Result<(), StorageFailure> {
        let index = self.read_log(DATASET_INDEX_FILE)?;
        let mut loaded = HashMap::new();
        for rec in data_rows(&index, DATASET_INDEX_FILE, &DATASET_INDEX_HEADER).0 {
            let [id, ingested_at, _count] = match <[String; 3]>::try_from(rec.1) {
                Ok(f) => f,
                Err(_) => continue,
            };
            let Some(ingested_at) = parse_timestamp(&ingested_at) else {
                warn!(dataset = %id, "bad ingested_at in dataset index; skipping");
                continue;
            };
            match self.read_dataset_file(&id, ingested_at) {
                Ok(ds) => {
                    loaded.insert(id, Arc::new(ds));
                }
                Err(detail) => warn!(dataset = %id, %detail, "skipping unreadable dataset"),
            }
        }
        *self.datasets.write().unwrap_or_else(|e| e.into_inner()) = loaded;
        Ok(())
    }

    fn read_dataset_file(&self, id: &str, ingested_at: DateTime<Utc>) -> Result<Dataset, String> {
        let path = self.dataset_path(id);
        let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut documents = Vec::new();
        let (rows, corrupt) = data_rows(&text, "dataset", &DATASET_HEADER);
        if let Some(c) = corrupt.first() {
            return Err(format!("row {}: {}", c.row, c.detail));
        }
        for (_, fields) in rows {
            let [doc_id, filename, description, mrn, note_text, truth] =
                <[String; 6]>::try_from(fields).map_err(|_| "wrong field count".to_string())?;
            documents.push(Document {
                id: doc_id,
                filename,
                description,
                mrn,
                note_text,
                true_origin: (!truth.is_empty()).then(|| GroundTruth::new(truth)),
            });
        }
        Ok(Dataset {
            id: id.to_string(),
            documents,
            ingested_at,
        })
    }

    // Sessions

    pub fn append_session(&self, session: &SessionRecord) -> Result<(), StorageFailure> {
        self.append(
            SESSIONS_FILE,
            &[
                session.session_id.clone(),
                session.evaluator_name.clone(),
                session.dataset_id.clone(),
                format_timestamp(&session.created_at),
                session
                    .shuffle_seed
                    .map(|s| s.to_string())
                    .unwrap_or_default(),
                session.document_order.join(" "),
            ],
        )
    }

    pub fn load_sessions(&self) -> Result<(Vec<SessionRecord>, Vec<CorruptRow>), StorageFailure> {
        let text = self.read_log(SESSIONS_FILE)?;
        let (rows, mut corrupt) = data_rows(&text, SESSIONS_FILE, &SESSION_HEADER);
        let mut sessions = Vec::new();
        for (row, fields) in rows {
            match parse_session(fields) {
                Ok(s) => sessions.push(s),
                Err(detail) => corrupt.push(CorruptRow {
                    file: SESSIONS_FILE,
                    row,
                    detail,
                }),
            }
        }
        Ok((sessions, corrupt))
    }

    // Evaluations

    /// Durably records one evaluation.
    pub fn append_evaluation(&self, record: &EvaluationRecord) -> Result<(), StorageFailure> {
        let mut fields = record.export_fields();
        fields.push(record.session_id.clone());
        fields.push(record.dataset_id.clone());
        self.append(EVALUATIONS_FILE, &fields)
    }

    /// Every readable evaluation row in file order, before replacement.
    pub fn evaluation_log(&self) -> Result<LoadReport, StorageFailure> {
        let text = self.read_log(EVALUATIONS_FILE)?;
        let header: Vec<&str> = evaluation_header().collect();
        let (rows, mut corrupt) = data_rows(&text, EVALUATIONS_FILE, &header);
        let mut records = Vec::with_capacity(rows.len());
        for (row, fields) in rows {
            match self.parse_evaluation(fields) {
                Ok(r) => records.push(r),
                Err(detail) => corrupt.push(CorruptRow {
                    file: EVALUATIONS_FILE,
                    row,
                    detail,
                }),
            }
        }
        Ok(LoadReport { records, corrupt })
    }

    /// Effective evaluations: latest per (evaluator, document), ordered by
    /// timestamp then filename. Unreadable rows are skipped and reported.
    pub fn load_all(&self) -> Result<LoadReport, StorageFailure> {
        let LoadReport { records, corrupt } = self.evaluation_log()?;
        for c in &corrupt {
            warn!(file = c.file, row = c.row, detail = %c.detail, "skipping corrupt row");
        }
        Ok(LoadReport {
            records: effective(records),
            corrupt,
        })
    }

    /// The results export: [`EXPORT_HEADER`] then one row per effective evaluation.
    pub fn export_results_csv(&self) -> Result<Vec<u8>, StorageFailure> {
        let report = self.load_all()?;
        Ok(render_export(&report.records))
    }

    fn parse_evaluation(&self, fields: Vec<String>) -> Result<EvaluationRecord, String> {
        let fields: [String; 18] = fields
            .try_into()
            .map_err(|f: Vec<String>| format!("expected 18 fields, found {}", f.len()))?;
        let [filename, description, mrn, evaluator, timestamp, s1, s2, s3, s4, s5, s6, s7, s8, s9, total, origin, session_id, dataset_id] =
            fields;
        if evaluator.trim().is_empty() {
            return Err("empty evaluator".into());
        }
        let timestamp =
            parse_timestamp(&timestamp).ok_or_else(|| format!("bad timestamp `{timestamp}`"))?;
        let mut raw = std::collections::BTreeMap::new();
        for (key, value) in CriterionKey::ALL
            .iter()
            .zip([s1, s2, s3, s4, s5, s6, s7, s8, s9])
        {
            let v: i64 = value
                .parse()
                .map_err(|_| format!("{key}: `{value}` is not an integer"))?;
            raw.insert(key.as_str().to_string(), v);
        }
        let scores = validate_scores(&raw).map_err(|e| e.to_string())?;
        if total.parse::<u32>().ok() != Some(scores.total()) {
            return Err(format!("total_score `{total}` does not match scores"));
        }
        let origin = match origin.as_str() {
            "human" => Origin::Human,
            "ai" => Origin::Ai,
            "unsure" => Origin::Unsure,
            other => return Err(format!("bad origin_assessment `{other}`")),
        };
        let dataset = self
            .dataset(&dataset_id)
            .ok_or_else(|| format!("unknown dataset `{dataset_id}`"))?;
        let document = dataset
            .document_by_filename(&filename)
            .ok_or_else(|| format!("unknown document `{filename}`"))?;
        Ok(EvaluationRecord {
            evaluation: Evaluation {
                document_id: document.id.clone(),
                evaluator_name: evaluator,
                scores,
                origin,
                timestamp,
            },
            session_id,
            dataset_id,
            filename,
            description,
            mrn,
        })
    }
}

/// Applies replacement (latest timestamp wins, later append breaks ties) and
/// sorts by timestamp, then filename.
pub fn effective(records: Vec<EvaluationRecord>) -> Vec<EvaluationRecord> {
    let mut latest: HashMap<(String, String), usize> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        let key = (
            r.evaluation.evaluator_name.clone(),
            r.evaluation.document_id.clone(),
        );
        match latest.get(&key) {
            Some(&j) if records[j].evaluation.timestamp > r.evaluation.timestamp => {}
            _ => {
                latest.insert(key, i);
            }
        }
    }
    let keep: HashSet<usize> = latest.into_values().collect();
    let mut out: Vec<(usize, EvaluationRecord)> = records
        .into_iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .collect();
    out.sort_by(|(ia, a), (ib, b)| {
        (
            a.evaluation.timestamp,
            &a.filename,
            &a.evaluation.evaluator_name,
            ia,
        )
            .cmp(&(
                b.evaluation.timestamp,
                &b.filename,
                &b.evaluation.evaluator_name,
                ib,
            ))
    });
    out.into_iter().map(|(_, r)| r).collect()
}

pub fn render_export(records: &[EvaluationRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_record(&mut buf, EXPORT_HEADER).expect("write to vec");
    for r in records {
        write_record(&mut buf, r.export_fields()).expect("write to vec");
    }
    buf
}

fn parse_session(fields: Vec<String>) -> Result<SessionRecord, String> {
    let [session_id, evaluator_name, dataset_id, created_at, seed, order] =
        <[String; 6]>::try_from(fields)
            .map_err(|f| format!("expected 6 fields, found {}", f.len()))?;
    let created_at =
        parse_timestamp(&created_at).ok_or_else(|| format!("bad created_at `{created_at}`"))?;
    let shuffle_seed = if seed.is_empty() {
        None
    } else {
        Some(
            seed.parse()
                .map_err(|_| format!("bad shuffle_seed `{seed}`"))?,
        )
    };
    Ok(SessionRecord {
        session_id,
        evaluator_name,
        dataset_id,
        created_at,
        shuffle_seed,
        document_order: order.split_whitespace().map(str::to_string).collect(),
    })
}

/// Splits a log into (row number, fields) for data rows whose width matches
/// the header, reporting everything else.
fn data_rows(
    text: &str,
    file: &'static str,
    header: &[&str],
) -> (Vec<(usize, Vec<String>)>, Vec<CorruptRow>) {
    let mut rows = Vec::new();
    let mut corrupt = Vec::new();
    for item in Reader::new(text) {
        match item {
            Ok(rec) if rec.row == 1 => {
                if rec.fields != header {
                    corrupt.push(CorruptRow {
                        file,
                        row: 1,
                        detail: "unexpected header".into(),
                    });
                }
            }
            Ok(rec) if rec.fields.len() != header.len() => corrupt.push(CorruptRow {
                file,
                row: rec.row,
                detail: format!(
                    "expected {} fields, found {}",
                    header.len(),
                    rec.fields.len()
                ),
            }),
            Ok(rec) => rows.push((rec.row, rec.fields)),
            Err(e) => corrupt.push(CorruptRow {
                file,
                row: e.row(),
                detail: e.to_string(),
            }),
        }
    }
    (rows, corrupt)
}

fn write_synced(path: &Path, bytes: &[u8]) -> Result<(), StorageFailure> {
    let mut f = File::create(path).context(|| format!("creating {}", path.display()))?;
    f.write_all(bytes)
        .and_then(|_| f.sync_all())
        .context(|| format!("writing {}", path.display()))
}

/// Truncates an append-only file to the end of its last complete record.
fn repair_tail(path: &Path) -> Result<(), StorageFailure> {
    let bytes = fs::read(path).context(|| format!("reading {}", path.display()))?;
    let valid = match std::str::from_utf8(&bytes) {
        Ok(s) => s,
        Err(e) => std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("valid prefix"),
    };
    let mut reader = Reader::new(valid);
    let mut good_end = 0;
    while let Some(item) = reader.next() {
        match item {
            Ok(rec) if rec.unterminated => break,
            Ok(rec) => good_end = rec.end,
            Err(SyntaxError::UnterminatedQuote { .. }) => break,
            Err(SyntaxError::TextAfterQuote { .. }) => {
                let pos = reader.position();
                if valid.as_bytes()[..pos].ends_with(b"\n") {
                    good_end = pos;
                } else {
                    break;
                }
            }
        }
    }
    if good_end < bytes.len() {
        warn!(
            file = %path.display(),
            dropped = bytes.len() - good_end,
            "truncating incomplete trailing row"
        );
        let f = OpenOptions::new()
            .write(true)
            .open(path)
            .context(|| format!("opening {}", path.display()))?;
        f.set_len(good_end as u64)
            .and_then(|_| f.sync_all())
            .context(|| format!("truncating {}", path.display()))?;
    }
    Ok(())
}
