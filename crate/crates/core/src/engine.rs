//! Evaluator sessions: ordered, blinded, note-by-note rating.
//!
//! A session walks one dataset in a fixed order (dataset order, or a seeded
//! shuffle). Documents are completed strictly in that order; an already
//! completed document may be resubmitted, which replaces its stored
//! evaluation without changing progress. All mutations of one session are
//! serialized by that session's mutex.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analytics::{summary_report, SummaryReport};
use crate::ingestion::{parse_documents_csv, Dataset, Document, IngestError, IngestWarning};
use crate::persistence::{EvaluationRecord, LoadReport, SessionRecord, StorageFailure, Store};
use crate::rubric::{validate_scores, Evaluation, Origin, ScoreErrors};

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        crate::now_seconds()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub completed: usize,
    pub total: usize,
    pub percent: u8,
}

impl Progress {
    /// Percent is rounded to the nearest integer, halves away from zero.
    pub fn new(completed: usize, total: usize) -> Self {
        assert!(total > 0 && completed <= total);
        let percent = (200 * completed + total) / (2 * total);
        Progress {
            completed,
            total,
            percent: percent as u8,
        }
    }
}

impl fmt::Display for Progress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} of {} documents evaluated ({}%)",
            self.completed, self.total, self.percent
        )
    }
}

/// The part of a [`Document`] an evaluator may see.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentView {
    pub id: String,
    pub filename: String,
    pub description: String,
    pub mrn: String,
    pub note_text: String,
}

impl From<&Document> for DocumentView {
    fn from(d: &Document) -> Self {
        DocumentView {
            id: d.id.clone(),
            filename: d.filename.clone(),
            description: d.description.clone(),
            mrn: d.mrn.clone(),
            note_text: d.note_text.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NextDocument {
    Document(DocumentView),
    AllDone,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationSession {
    pub id: String,
    pub evaluator_name: String,
    pub dataset_id: String,
    pub document_order: Vec<String>,
    pub completed: HashSet<String>,
}

impl EvaluationSession {
    pub fn progress(&self) -> Progress {
        Progress::new(self.completed.len(), self.document_order.len())
    }

    pub fn current(&self) -> Option<&str> {
        self.document_order
            .iter()
            .find(|id| !self.completed.contains(*id))
            .map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub evaluator_name: String,
    pub dataset_id: String,
    pub progress: Progress,
}

impl From<&EvaluationSession> for SessionInfo {
    fn from(s: &EvaluationSession) -> Self {
        SessionInfo {
            session_id: s.id.clone(),
            evaluator_name: s.evaluator_name.clone(),
            dataset_id: s.dataset_id.clone(),
            progress: s.progress(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IngestOutcome {
    pub dataset: Arc<Dataset>,
    pub warnings: Vec<IngestWarning>,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("document `{0}` is not part of this session")]
    UnknownDocument(String),
    #[error("dataset has no documents")]
    EmptyDataset,
    #[error("evaluator name is blank")]
    BlankEvaluatorName,
    #[error(transparent)]
    InvalidScores(#[from] ScoreErrors),
    #[error("document `{submitted}` cannot be evaluated yet; the current document is `{current}`")]
    OutOfOrder { submitted: String, current: String },
    #[error(transparent)]
    Storage(#[from] StorageFailure),
}

pub struct Engine {
    store: Store,
    clock: Box<dyn Clock>,
    sessions: RwLock<HashMap<String, Arc<Mutex<EvaluationSession>>>>,
}

impl Engine {
    pub fn open(data_dir: impl AsRef<Path>) -> Result<Self, StorageFailure> {
        Self::with_clock(data_dir, SystemClock)
    }

    /// Opens the store and restores sessions and their completion state.
    pub fn with_clock(
        data_dir: impl AsRef<Path>,
        clock: impl Clock + 'static,
    ) -> Result<Self, StorageFailure> {
        let store = Store::open(data_dir)?;
        let (records, _) = store.load_sessions()?;
        let log = store.evaluation_log()?;
        let mut done: HashMap<&str, HashSet<&str>> = HashMap::new();
        for r in &log.records {
            done.entry(r.session_id.as_str())
                .or_default()
                .insert(r.evaluation.document_id.as_str());
        }
        let mut sessions = HashMap::new();
        for rec in records {
            if store.dataset(&rec.dataset_id).is_none() {
                continue;
            }
            let completed = done
                .get(rec.session_id.as_str())
                .map(|set| {
                    rec.document_order
                        .iter()
                        .filter(|id| set.contains(id.as_str()))
                        .cloned()
                        .collect()
                })
                .unwrap_or_default();
            let session = EvaluationSession {
                id: rec.session_id.clone(),
                evaluator_name: rec.evaluator_name,
                dataset_id: rec.dataset_id,
                document_order: rec.document_order,
                completed,
            };
            sessions.insert(rec.session_id, Arc::new(Mutex::new(session)));
        }
        Ok(Engine {
            store,
            clock: Box::new(clock),
            sessions: RwLock::new(sessions),
        })
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// Parses an uploaded corpus and persists it.
    pub fn ingest(&self, content: &[u8]) -> Result<IngestOutcome, EngineError> {
        let parsed = parse_documents_csv(content)?;
        let dataset = self.store.save_dataset(parsed.dataset)?;
        Ok(IngestOutcome {
            dataset,
            warnings: parsed.warnings,
        })
    }

    pub fn start_session(
        &self,
        evaluator_name: &str,
        dataset_id: &str,
        shuffle_seed: Option<u64>,
    ) -> Result<SessionInfo, EngineError> {
        let evaluator_name = evaluator_name.trim();
        if evaluator_name.is_empty() {
            return Err(EngineError::BlankEvaluatorName);
        }
        let dataset = self
            .store
            .dataset(dataset_id)
            .ok_or_else(|| EngineError::UnknownDataset(dataset_id.to_string()))?;
        if dataset.documents.is_empty() {
            return Err(EngineError::EmptyDataset);
        }
        let session = EvaluationSession {
            id: uuid::Uuid::new_v4().simple().to_string(),
            evaluator_name: evaluator_name.to_string(),
            dataset_id: dataset.id.clone(),
            document_order: document_order(&dataset, shuffle_seed),
            completed: HashSet::new(),
        };
        self.store.append_session(&SessionRecord {
            session_id: session.id.clone(),
            evaluator_name: session.evaluator_name.clone(),
            dataset_id: session.dataset_id.clone(),
            created_at: self.clock.now(),
            shuffle_seed,
            document_order: session.document_order.clone(),
        })?;
        let info = SessionInfo::from(&session);
        self.sessions
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(session.id.clone(), Arc::new(Mutex::new(session)));
        Ok(info)
    }

    fn session_handle(&self, id: &str) -> Result<Arc<Mutex<EvaluationSession>>, EngineError> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| EngineError::UnknownSession(id.to_string()))
    }

    /// A snapshot of the session state.
    pub fn session(&self, id: &str) -> Result<EvaluationSession, EngineError> {
        let handle = self.session_handle(id)?;
        let s = handle.lock().unwrap_or_else(|e| e.into_inner());
        Ok(s.clone())
    }

    pub fn session_info(&self, id: &str) -> Result<SessionInfo, EngineError> {
        Ok(SessionInfo::from(&self.session(id)?))
    }

    pub fn progress(&self, id: &str) -> Result<Progress, EngineError> {
        Ok(self.session(id)?.progress())
    }

    /// The first document in session order not yet completed, or `AllDone`.
    pub fn current_document(&self, id: &str) -> Result<(NextDocument, Progress), EngineError> {
        let session = self.session(id)?;
        let progress = session.progress();
        let Some(doc_id) = session.current() else {
            return Ok((NextDocument::AllDone, progress));
        };
        let dataset = self.dataset_for(&session)?;
        let doc = dataset
            .document(doc_id)
            .ok_or_else(|| EngineError::UnknownDocument(doc_id.to_string()))?;
        Ok((NextDocument::Document(DocumentView::from(doc)), progress))
    }

    fn dataset_for(&self, session: &EvaluationSession) -> Result<Arc<Dataset>, EngineError> {
        self.store
            .dataset(&session.dataset_id)
            .ok_or_else(|| EngineError::UnknownDataset(session.dataset_id.clone()))
    }

    /// Validates and stores one evaluation, then marks the document complete.
    pub fn submit_evaluation(
        &self,
        session_id: &str,
        document_id: &str,
        raw_scores: &BTreeMap<String, i64>,
        origin: Origin,
    ) -> Result<Progress, EngineError> {
        let handle = self.session_handle(session_id)?;
        let mut session = handle.lock().unwrap_or_else(|e| e.into_inner());
        let dataset = self.dataset_for(&session)?;
        let document = dataset
            .document(document_id)
            .filter(|_| session.document_order.iter().any(|d| d == document_id))
            .ok_or_else(|| EngineError::UnknownDocument(document_id.to_string()))?;
        let scores = validate_scores(raw_scores)?;
        if !session.completed.contains(document_id) {
            let current = session.current().unwrap_or_default();
            if current != document_id {
                return Err(EngineError::OutOfOrder {
                    submitted: document_id.to_string(),
                    current: current.to_string(),
                });
            }
        }
        let evaluation = Evaluation {
            document_id: document.id.clone(),
            evaluator_name: session.evaluator_name.clone(),
            scores,
            origin,
            timestamp: self.clock.now(),
        };
        self.store.append_evaluation(&EvaluationRecord::new(
            evaluation,
            &session.id,
            &session.dataset_id,
            document,
        ))?;
        session.completed.insert(document.id.clone());
        Ok(session.progress())
    }

    /// Effective evaluations with document metadata.
    pub fn results(&self) -> Result<LoadReport, EngineError> {
        Ok(self.store.load_all()?)
    }

    pub fn export_csv(&self) -> Result<Vec<u8>, EngineError> {
        Ok(self.store.export_results_csv()?)
    }

    pub fn summary(&self) -> Result<SummaryReport, EngineError> {
        let records = self.store.load_all()?.records;
        let evaluations: Vec<Evaluation> = records.into_iter().map(|r| r.evaluation).collect();
        let mut truth = HashMap::new();
        for ds in self.store.datasets() {
            for d in &ds.documents {
                if let Some(o) = d.true_origin.as_ref().and_then(|t| t.origin()) {
                    truth.insert(d.id.clone(), o);
                }
            }
        }
        Ok(summary_report(&evaluations, &truth))
    }
}

/// Dataset order, or a ChaCha8 shuffle seeded with `seed`.
pub fn document_order(dataset: &Dataset, seed: Option<u64>) -> Vec<String> {
    let mut order: Vec<String> = dataset.documents.iter().map(|d| d.id.clone()).collect();
    if let Some(seed) = seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    order
}
