use crate::error::{ApiError, FieldIssue};
use axum::body::Bytes;
use axum::extract::{FromRequest, Multipart, Path, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use pdqi_core::engine::SessionInfo;
use pdqi_core::ingestion::{validate_dataset, DocumentIssue, IngestWarning, ValidationOptions};
use pdqi_core::persistence::EvaluationRecord;
use pdqi_core::rubric::{ANCHOR_HIGH, ANCHOR_LOW};
use pdqi_core::{
    format_timestamp, rubric, DocumentView, Engine, NextDocument, Origin, Progress,
    RubricCriterion, EXPORT_HEADER,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

pub type AppState = Arc<Engine>;

/// Runs a blocking engine call off the async workers.
async fn blocking<T, F>(engine: &AppState, f: F) -> Result<T, ApiError>
where
    F: FnOnce(&Engine) -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    let engine = Arc::clone(engine);
    tokio::task::spawn_blocking(move || f(&engine))
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

fn parse_json<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    if body.is_empty() {
        return Err(ApiError::bad_request("empty_body", "request body is empty"));
    }
    serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request("invalid_json", format!("invalid request body: {e}")))
}

// Datasets

#[derive(Debug, Serialize)]
pub struct DatasetCreated {
    pub dataset_id: String,
    pub document_count: usize,
    pub warnings: Vec<IngestWarning>,
    /// Metadata quality findings; none of them block ingestion.
    pub issues: Vec<DocumentIssue>,
}

/// The CSV payload: the first file part of a multipart form, or the raw body.
async fn upload_body(request: Request) -> Result<Bytes, ApiError> {
    let is_multipart = request
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.to_ascii_lowercase().starts_with("multipart/form-data"));
    if !is_multipart {
        return Bytes::from_request(request, &())
            .await
            .map_err(|e| ApiError::bad_request("invalid_body", e.body_text()));
    }
    let mut form = Multipart::from_request(request, &())
        .await
        .map_err(|e| ApiError::bad_request("invalid_multipart", e.body_text()))?;
    let bad = |e: axum::extract::multipart::MultipartError| {
        ApiError::bad_request("invalid_multipart", e.body_text())
    };
    let mut fallback = None;
    while let Some(field) = form.next_field().await.map_err(bad)? {
        let is_file = field.file_name().is_some() || field.name() == Some("file");
        let data = field.bytes().await.map_err(bad)?;
        if is_file {
            return Ok(data);
        }
        fallback.get_or_insert(data);
    }
    fallback.ok_or_else(|| ApiError::bad_request("empty_file", "multipart form has no file part"))
}

pub async fn create_dataset(
    State(engine): State<AppState>,
    request: Request,
) -> Result<(StatusCode, Json<DatasetCreated>), ApiError> {
    let body = upload_body(request).await?;
    let created = blocking(&engine, move |engine| {
        let outcome = engine.ingest(&body)?;
        let report = validate_dataset(&outcome.dataset, &ValidationOptions::default());
        Ok(DatasetCreated {
            dataset_id: outcome.dataset.id.clone(),
            document_count: outcome.dataset.documents.len(),
            warnings: outcome.warnings,
            issues: report.issues,
        })
    })
    .await?;
    Ok((StatusCode::CREATED, Json(created)))
}

#[derive(Debug, Serialize)]
pub struct DatasetSummary {
    pub dataset_id: String,
    pub document_count: usize,
    pub ingested_at: String,
}

pub async fn list_datasets(State(engine): State<AppState>) -> Json<Vec<DatasetSummary>> {
    let mut list: Vec<DatasetSummary> = engine
        .store()
        .datasets()
        .iter()
        .map(|d| DatasetSummary {
            dataset_id: d.id.clone(),
            document_count: d.documents.len(),
            ingested_at: format_timestamp(&d.ingested_at),
        })
        .collect();
    list.sort_by(|a, b| (&a.ingested_at, &a.dataset_id).cmp(&(&b.ingested_at, &b.dataset_id)));
    Json(list)
}

// Sessions

#[derive(Debug, Deserialize)]
struct StartSession {
    evaluator_name: String,
    dataset_id: String,
    #[serde(default)]
    shuffle_seed: Option<u64>,
}

pub async fn start_session(
    State(engine): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<SessionInfo>), ApiError> {
    let req: StartSession = parse_json(&body)?;
    let info = blocking(&engine, move |engine| {
        Ok(engine.start_session(&req.evaluator_name, &req.dataset_id, req.shuffle_seed)?)
    })
    .await?;
    Ok((StatusCode::CREATED, Json(info)))
}

pub async fn get_session(
    State(engine): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<SessionInfo>, ApiError> {
    Ok(Json(engine.session_info(&id)?))
}

#[derive(Debug, Serialize)]
pub struct NextResponse {
    pub done: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<DocumentView>,
    pub progress: Progress,
}

pub async fn next_document(
    State(engine): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<NextResponse>, ApiError> {
    let (next, progress) = engine.current_document(&id)?;
    Ok(Json(match next {
        NextDocument::Document(view) => NextResponse {
            done: false,
            document: Some(view),
            progress,
        },
        NextDocument::AllDone => NextResponse {
            done: true,
            document: None,
            progress,
        },
    }))
}

#[derive(Debug, Deserialize)]
struct SubmitEvaluation {
    document_id: String,
    scores: Map<String, Value>,
    origin: String,
}

#[derive(Debug, Serialize)]
pub struct Submitted {
    pub progress: Progress,
}

/// Keeps integer scores; anything else becomes an `invalid_score` issue.
fn integer_scores(raw: Map<String, Value>) -> Result<BTreeMap<String, i64>, ApiError> {
    let mut scores = BTreeMap::new();
    let mut issues = Vec::new();
    for (key, value) in raw {
        match value.as_i64() {
            Some(v) => {
                scores.insert(key, v);
            }
            None => issues.push(FieldIssue {
                code: "invalid_score".into(),
                message: format!("{key}: `{value}` is not an integer"),
                field: key,
            }),
        }
    }
    if issues.is_empty() {
        Ok(scores)
    } else {
        Err(ApiError::from_issues("invalid_score", issues))
    }
}

pub async fn submit_evaluation(
    State(engine): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Submitted>, ApiError> {
    let req: SubmitEvaluation = parse_json(&body)?;
    let origin: Origin = req
        .origin
        .parse()
        .map_err(|e: pdqi_core::rubric::InvalidOrigin| {
            ApiError::bad_request("invalid_origin", e.to_string()).with_field("origin")
        })?;
    let scores = integer_scores(req.scores)?;
    let progress = blocking(&engine, move |engine| {
        Ok(engine.submit_evaluation(&id, &req.document_id, &scores, origin)?)
    })
    .await?;
    Ok(Json(Submitted { progress }))
}

// Results

/// One effective evaluation keyed by the export column names, plus ids.
fn result_entry(record: &EvaluationRecord) -> Value {
    let mut entry = Map::new();
    for (i, (name, value)) in EXPORT_HEADER.iter().zip(record.export_fields()).enumerate() {
        // Nine scores and the total are numbers.
        let value = match value.parse::<u64>() {
            Ok(n) if (5..15).contains(&i) => Value::from(n),
            _ => Value::from(value),
        };
        entry.insert((*name).to_string(), value);
    }
    entry.insert(
        "document_id".into(),
        record.evaluation.document_id.clone().into(),
    );
    entry.insert("dataset_id".into(), record.dataset_id.clone().into());
    entry.insert("session_id".into(), record.session_id.clone().into());
    Value::Object(entry)
}

pub async fn results(State(engine): State<AppState>) -> Result<Json<Vec<Value>>, ApiError> {
    blocking(&engine, |engine| {
        let report = engine.results()?;
        Ok(Json(report.records.iter().map(result_entry).collect()))
    })
    .await
}

pub const EXPORT_FILENAME: &str = "pdqi9_results.csv";

pub async fn export(State(engine): State<AppState>) -> Result<Response, ApiError> {
    let body = blocking(&engine, |engine| Ok(engine.export_csv()?)).await?;
    Ok((
        [
            (header::CONTENT_TYPE, "text/csv; charset=utf-8".to_string()),
            (
                header::CONTENT_DISPOSITION,
                format!("attachment; filename=\"{EXPORT_FILENAME}\""),
            ),
        ],
        body,
    )
        .into_response())
}

pub async fn summary(State(engine): State<AppState>) -> Result<Response, ApiError> {
    blocking(
        &engine,
        |engine| Ok(Json(engine.summary()?).into_response()),
    )
    .await
}

// Rubric

#[derive(Debug, Serialize)]
pub struct OriginOption {
    pub key: Origin,
    pub label: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Anchors {
    pub low: &'static str,
    pub high: &'static str,
}

#[derive(Debug, Serialize)]
pub struct RubricResponse {
    pub criteria: &'static [RubricCriterion],
    pub scale: [u8; 2],
    pub anchors: Anchors,
    pub origins: Vec<OriginOption>,
}

pub async fn get_rubric() -> Json<RubricResponse> {
    Json(RubricResponse {
        criteria: rubric(),
        scale: [pdqi_core::LikertScore::MIN, pdqi_core::LikertScore::MAX],
        anchors: Anchors {
            low: ANCHOR_LOW,
            high: ANCHOR_HIGH,
        },
        origins: Origin::ALL
            .into_iter()
            .map(|key| OriginOption {
                key,
                label: key.form_label(),
            })
            .collect(),
    })
}

// Fallbacks

pub async fn not_found(request: Request) -> ApiError {
    ApiError::new(
        StatusCode::NOT_FOUND,
        "not_found",
        format!("no route for {} {}", request.method(), request.uri().path()),
    )
}

pub async fn method_not_allowed(request: Request) -> ApiError {
    ApiError::new(
        StatusCode::METHOD_NOT_ALLOWED,
        "method_not_allowed",
        format!(
            "{} is not allowed on {}",
            request.method(),
            request.uri().path()
        ),
    )
}
