//! HTTP API over a [`pdqi_core::Engine`].
//!
//! Structured endpoints speak JSON; the export is `text/csv`. Every error on
//! `/api/*` is a JSON body with a machine `code`.

pub mod api;
pub mod error;

pub use error::{ApiError, FieldIssue};

use axum::extract::DefaultBodyLimit;
use axum::routing::{any, get, post};
use axum::Router;
use pdqi_core::Engine;
use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use tokio::net::TcpListener;
use tower_http::services::{ServeDir, ServeFile};

pub const DEFAULT_PORT: u16 = 7860;

/// Uploaded datasets may be large.
const UPLOAD_LIMIT: usize = 64 * 1024 * 1024;

fn routes() -> Router<Arc<Engine>> {
    Router::new()
        .route(
            "/api/datasets",
            get(api::list_datasets)
                .post(api::create_dataset)
                .layer(DefaultBodyLimit::max(UPLOAD_LIMIT)),
        )
        .route("/api/sessions", post(api::start_session))
        .route("/api/sessions/{id}", get(api::get_session))
        .route("/api/sessions/{id}/next", get(api::next_document))
        .route(
            "/api/sessions/{id}/evaluations",
            post(api::submit_evaluation),
        )
        .route("/api/results", get(api::results))
        .route("/api/results/export", get(api::export))
        .route("/api/summary", get(api::summary))
        .route("/api/rubric", get(api::get_rubric))
        .method_not_allowed_fallback(api::method_not_allowed)
}

/// The API alone; unknown paths get a JSON 404.
pub fn api_router(engine: Arc<Engine>) -> Router {
    routes().fallback(api::not_found).with_state(engine)
}

/// The API, plus the UI bundle from `ui_dir` for every path outside `/api`.
pub fn router(engine: Arc<Engine>, ui_dir: Option<PathBuf>) -> Router {
    let Some(dir) = ui_dir else {
        return api_router(engine);
    };
    let index = dir.join("index.html");
    routes()
        .route("/api", any(api::not_found))
        .route("/api/{*rest}", any(api::not_found))
        .fallback_service(ServeDir::new(dir).fallback(ServeFile::new(index)))
        .with_state(engine)
}

pub async fn bind(port: u16) -> io::Result<TcpListener> {
    TcpListener::bind(SocketAddr::from(([0, 0, 0, 0], port))).await
}

/// Serves until Ctrl-C.
pub async fn serve(listener: TcpListener, app: Router) -> io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
