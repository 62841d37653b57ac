//! HTTP/1.1 JSON front end for the store.
//!
//! ```text
//! PUT  /assets/{fqn}                      publish (201 | 409 | 422)
//! GET  /assets/{fqn}/versions/{n}         one version (200 | 404)
//! GET  /assets/{fqn}/latest               latest version (200 | 404)
//! GET  /assets?q=&semantic_type=          discovery listing
//! GET  /semantic-types/{semid}/fields     cross-asset semantic search
//! GET  /assets/{fqn}/transforms?from=&to= migration transform chain
//! ```

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::compat::Verdict;
use crate::model::SemanticTypeId;

use super::store::{ActualizeOptions, AssetId, RegistryError, Store, VersionSelector};

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/assets", get(list_assets))
        .route("/assets/{fqn}", put(put_asset))
        .route("/assets/{fqn}/latest", get(get_latest))
        .route("/assets/{fqn}/versions/{n}", get(get_version))
        .route("/assets/{fqn}/transforms", get(get_transforms))
        .route("/semantic-types/{semid}/fields", get(semantic_fields))
        .with_state(store)
}

/// Binds and serves until the task is dropped or the process exits.
pub async fn serve(store: Arc<Store>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}

struct ApiError(RegistryError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self.0 {
            RegistryError::NotFound(what) => {
                (StatusCode::NOT_FOUND, json!({ "error": what }))
            }
            RegistryError::ConcurrentModification { expected, actual } => (
                StatusCode::CONFLICT,
                json!({
                    "error": "concurrent modification",
                    "expected_parent": expected,
                    "latest": actual,
                }),
            ),
            RegistryError::BreakingRejected { verdict } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({ "error": "breaking change rejected", "verdict": verdict }),
            ),
            RegistryError::InvalidDocument { message } => {
                (StatusCode::BAD_REQUEST, json!({ "error": message }))
            }
            other => (StatusCode::INTERNAL_SERVER_ERROR, json!({ "error": other.to_string() })),
        };
        (status, Json(body)).into_response()
    }
}

impl From<RegistryError> for ApiError {
    fn from(e: RegistryError) -> Self {
        Self(e)
    }
}

#[derive(Deserialize)]
struct PutBody {
    document: String,
    author: String,
    #[serde(default)]
    expected_parent: Option<u32>,
    #[serde(default)]
    allow_removals: bool,
}

#[derive(Serialize)]
struct PutResponse {
    version: u32,
    verdict: Verdict,
}

async fn put_asset(
    State(store): State<Arc<Store>>,
    Path(fqn): Path<String>,
    Json(body): Json<PutBody>,
) -> Result<(StatusCode, Json<PutResponse>), ApiError> {
    let asset = AssetId::new(fqn)?;
    let (version, verdict) = store.actualize(
        &asset,
        &body.document,
        &body.author,
        body.expected_parent,
        ActualizeOptions { allow_removals: body.allow_removals },
    )?;
    Ok((StatusCode::CREATED, Json(PutResponse { version, verdict })))
}

async fn get_latest(
    State(store): State<Arc<Store>>,
    Path(fqn): Path<String>,
) -> Result<Response, ApiError> {
    let entry = store.get(&AssetId(fqn), VersionSelector::Latest)?;
    Ok(Json(entry).into_response())
}

async fn get_version(
    State(store): State<Arc<Store>>,
    Path((fqn, n)): Path<(String, u32)>,
) -> Result<Response, ApiError> {
    let entry = store.get(&AssetId(fqn), VersionSelector::Version(n))?;
    Ok(Json(entry).into_response())
}

#[derive(Deserialize)]
struct ListQuery {
    #[serde(default)]
    q: Option<String>,
    #[serde(default)]
    semantic_type: Option<String>,
}

async fn list_assets(
    State(store): State<Arc<Store>>,
    Query(query): Query<ListQuery>,
) -> Result<Response, ApiError> {
    let semid = query.semantic_type.map(SemanticTypeId);
    let list = store.list_assets(query.q.as_deref(), semid.as_ref())?;
    Ok(Json(list).into_response())
}

async fn semantic_fields(
    State(store): State<Arc<Store>>,
    Path(semid): Path<String>,
) -> Result<Response, ApiError> {
    let hits = store.search_semantic(&SemanticTypeId(semid))?;
    Ok(Json(hits).into_response())
}

#[derive(Deserialize)]
struct TransformQuery {
    from: u32,
    to: u32,
}

async fn get_transforms(
    State(store): State<Arc<Store>>,
    Path(fqn): Path<String>,
    Query(query): Query<TransformQuery>,
) -> Result<Response, ApiError> {
    let chain = store.transform_chain(&AssetId(fqn), query.from, query.to)?;
    Ok(Json(chain).into_response())
}
