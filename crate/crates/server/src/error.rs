use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use pdqi_core::ingestion::IngestError;
use pdqi_core::EngineError;
use serde::Serialize;

/// One problem with a submitted field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldIssue {
    pub code: String,
    pub field: String,
    pub message: String,
}

/// JSON error body: `{code, message, field?, rows?, issues?}`.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub issues: Vec<FieldIssue>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            field: None,
            rows: Vec::new(),
            issues: Vec::new(),
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn with_field(mut self, field: impl Into<String>) -> Self {
        self.field = Some(field.into());
        self
    }

    /// Field-level validation failure; the first issue sets `code` and `field`.
    pub fn from_issues(code: &'static str, issues: Vec<FieldIssue>) -> Self {
        let message = issues
            .iter()
            .map(|i| i.message.as_str())
            .collect::<Vec<_>>()
            .join("; ");
        ApiError {
            field: issues.first().map(|i| i.field.clone()),
            issues,
            ..Self::bad_request(code, message)
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal_error", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = self.code, message = %self.message, "request failed");
        }
        (self.status, Json(&self)).into_response()
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> Self {
        ApiError {
            rows: e.rows(),
            ..Self::bad_request(e.code(), e.to_string())
        }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let message = e.to_string();
        match e {
            EngineError::Ingest(e) => e.into(),
            EngineError::UnknownDataset(_) => {
                Self::new(StatusCode::NOT_FOUND, "unknown_dataset", message)
                    .with_field("dataset_id")
            }
            EngineError::UnknownSession(_) => {
                Self::new(StatusCode::NOT_FOUND, "unknown_session", message)
            }
            EngineError::UnknownDocument(_) => {
                Self::new(StatusCode::NOT_FOUND, "unknown_document", message)
                    .with_field("document_id")
            }
            EngineError::EmptyDataset => {
                Self::bad_request("empty_dataset", message).with_field("dataset_id")
            }
            EngineError::BlankEvaluatorName => {
                Self::bad_request("blank_evaluator_name", message).with_field("evaluator_name")
            }
            EngineError::InvalidScores(errors) => {
                let code = errors.0.first().map_or("invalid_score", |i| i.code());
                let issues = errors
                    .0
                    .iter()
                    .map(|i| FieldIssue {
                        code: i.code().to_string(),
                        field: i.field().to_string(),
                        message: i.to_string(),
                    })
                    .collect();
                Self::from_issues(code, issues)
            }
            EngineError::OutOfOrder { .. } => {
                Self::new(StatusCode::CONFLICT, "out_of_order", message).with_field("document_id")
            }
            EngineError::Storage(_) => Self::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "storage_failure",
                message,
            ),
        }
    }
}
