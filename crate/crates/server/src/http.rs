//! JSON routes under `/api`.

use std::future::Future;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

use crate::service::{AnalysisDocument, GameService, ServiceError, SessionDocument};
use crate::session::EngineRole;

#[derive(Debug, Deserialize)]
pub struct CreateGameRequest {
    pub heaps: String,
    #[serde(default)]
    pub engine_role: EngineRole,
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    pub heap: usize,
    pub take: u32,
}

#[derive(Debug, Deserialize)]
pub struct AnalyzeQuery {
    pub heaps: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Health {
    pub status: String,
    pub table_horizon: u32,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    cap: Option<u32>,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::OutOfTurn(_) => StatusCode::CONFLICT,
            ServiceError::IllegalMove { .. } | ServiceError::NoSuchHeap { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::StoreFull => StatusCode::SERVICE_UNAVAILABLE,
            _ => StatusCode::BAD_REQUEST,
        };
        let body = ErrorBody {
            error: self.code(),
            message: self.to_string(),
            cap: self.cap(),
        };
        (status, Json(body)).into_response()
    }
}

type AppState = Arc<GameService>;

async fn create_game(
    State(service): State<AppState>,
    Json(req): Json<CreateGameRequest>,
) -> Result<(StatusCode, Json<SessionDocument>), ServiceError> {
    let doc = service.create_game(&req.heaps, req.engine_role)?;
    Ok((StatusCode::CREATED, Json(doc)))
}

async fn get_game(State(service): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionDocument>, ServiceError> {
    service.get_game(&id).map(Json)
}

async fn submit_move(
    State(service): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<MoveRequest>,
) -> Result<Json<SessionDocument>, ServiceError> {
    service.submit_move(&id, req.heap, req.take).map(Json)
}

async fn analyze(
    State(service): State<AppState>,
    Query(q): Query<AnalyzeQuery>,
) -> Result<Json<AnalysisDocument>, ServiceError> {
    service.analyze(&q.heaps).map(Json)
}

async fn health(State(service): State<AppState>) -> Json<Health> {
    Json(Health {
        status: "ok".to_string(),
        table_horizon: service.horizon(),
    })
}

pub fn router(service: Arc<GameService>) -> Router {
    Router::new()
        .route("/api/games", post(create_game))
        .route("/api/games/{id}", get(get_game))
        .route("/api/games/{id}/moves", post(submit_move))
        .route("/api/analyze", get(analyze))
        .route("/api/health", get(health))
        .with_state(service)
}

/// Serves the API on `listener` until `shutdown` resolves.
pub async fn serve<F>(listener: TcpListener, service: Arc<GameService>, shutdown: F) -> std::io::Result<()>
where
    F: Future<Output = ()> + Send + 'static,
{
    axum::serve(listener, router(service))
        .with_graceful_shutdown(shutdown)
        .await
}
