//! HTTP API over [`Harness`].
//!
//! - `POST /api/session` with `{study_id, participant_id}`
//! - `GET /api/session/{id}/task/{n}`
//! - `POST /api/session/{id}/response` with a [`SlotSubmission`]
//! - `GET /api/export/{study_id}`, bearer-authenticated with the admin token
//! - `GET /clips/{clip_id}` serves the clip file

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use super::store::{Harness, HarnessError};
use super::types::{SessionView, SlotSubmission, StudyId};

pub const ADMIN_TOKEN_ENV: &str = "SCENTPLAN_ADMIN_TOKEN";

#[derive(Clone)]
pub struct AppState {
    pub harness: Arc<Harness>,
    /// Export is refused when no token is configured.
    pub admin_token: Option<String>,
    /// Where exports are also written on every export request.
    pub export_dir: Option<std::path::PathBuf>,
}

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    pub study_id: String,
    pub participant_id: String,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
}

pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(ErrorBody { error: self.1 })).into_response()
    }
}

impl From<HarnessError> for ApiError {
    fn from(err: HarnessError) -> Self {
        let status = match &err {
            HarnessError::UnknownStudy(_)
            | HarnessError::UnknownSession(_)
            | HarnessError::UnknownQuestion(_) => StatusCode::NOT_FOUND,
            HarnessError::SessionCompleted(_) => StatusCode::CONFLICT,
            HarnessError::NotAPermutation
            | HarnessError::LikertOutOfRange(_)
            | HarnessError::InvalidResponse(_) => StatusCode::UNPROCESSABLE_ENTITY,
            HarnessError::NoSessions(_) => StatusCode::NOT_FOUND,
            HarnessError::MissingStimulus { .. }
            | HarnessError::Config(_)
            | HarnessError::Store(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, err.to_string())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/session", post(create_session))
        .route("/api/session/{id}/task/{n}", get(task))
        .route("/api/session/{id}/response", post(response))
        .route("/api/export/{study_id}", get(export))
        .route("/clips/{clip_id}", get(clip))
        .with_state(state)
}

async fn create_session(
    State(state): State<AppState>,
    Json(body): Json<CreateSession>,
) -> Result<Json<SessionView>, ApiError> {
    let session = state.harness.create_session(&body.study_id, &body.participant_id)?;
    Ok(Json(SessionView::from(&session)))
}

async fn task(
    State(state): State<AppState>,
    Path((id, n)): Path<(String, usize)>,
) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(state.harness.task(&id, n)?))
}

async fn response(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<SlotSubmission>,
) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(state.harness.submit_slots(&id, body)?))
}

async fn export(
    State(state): State<AppState>,
    Path(study_id): Path<String>,
    headers: HeaderMap,
) -> Result<impl IntoResponse, ApiError> {
    let Some(expected) = state.admin_token.as_deref() else {
        return Err(ApiError(
            StatusCode::SERVICE_UNAVAILABLE,
            format!("export disabled: {ADMIN_TOKEN_ENV} is not set"),
        ));
    };
    let presented = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "));
    if presented != Some(expected) {
        return Err(ApiError(StatusCode::UNAUTHORIZED, "invalid admin token".into()));
    }
    let study: StudyId = study_id
        .parse()
        .map_err(|_| ApiError::from(HarnessError::UnknownStudy(study_id.clone())))?;
    let export = state.harness.export(study)?;
    if let Some(dir) = &state.export_dir {
        super::write_export(dir, &export)
            .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    }
    Ok(Json(export))
}

async fn clip(
    State(state): State<AppState>,
    Path(clip_id): Path<String>,
) -> Result<impl IntoResponse, ApiError> {
    let path = state
        .harness
        .stimuli()
        .clip_files
        .get(&clip_id)
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown clip \"{clip_id}\"")))?;
    let bytes = tokio::fs::read(path)
        .await
        .map_err(|e| ApiError(StatusCode::NOT_FOUND, e.to_string()))?;
    let mime = match path.extension().and_then(|e| e.to_str()) {
        Some("webm") => "video/webm",
        Some("mov") => "video/quicktime",
        _ => "video/mp4",
    };
    Ok(([(header::CONTENT_TYPE, mime)], bytes))
}
