//! HTTP/JSON facade over `topicforge-core`.
//!
//! Every success body is produced by [`report::to_json`] on the same payload
//! types the CLI prints with `--json`, so the two front ends agree byte for
//! byte. Errors carry `{"error": code, "message": text}`.

pub mod error;
pub mod store;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::Serialize;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::timeout::TimeoutLayer;
use tower_http::trace::TraceLayer;

use topicforge_core::nmf::{factorize, NmfConfig};
use topicforge_core::query::{split_list, Query as Selection};
use topicforge_core::report::{
    self, to_json, CorpusRequest, CorpusSummary, FactorizationSummary, RenameRequest, ResidualCurve, Sparsity,
};
use topicforge_core::text::{build_corpus, Corpus};
use topicforge_core::workspace::StoredFactorization;

pub use error::ApiError;
pub use store::SessionStore;

/// Terms per topic when `k` is not given.
pub const DEFAULT_TOP_K: usize = 10;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub timeout: Duration,
    /// `None` allows any origin.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            timeout: Duration::from_secs(30),
            cors_origin: None,
        }
    }
}

pub type AppState = Arc<SessionStore>;

type ApiResult = Result<Response, ApiError>;

fn json(status: StatusCode, value: &(impl Serialize + ?Sized)) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], to_json(value)).into_response()
}

fn ok(value: &(impl Serialize + ?Sized)) -> ApiResult {
    Ok(json(StatusCode::OK, value))
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::bad_request("malformed_request", e.body_text()))
}

pub fn router(state: AppState, config: &ServiceConfig) -> Router {
    let cors = match &config.cors_origin {
        Some(origin) => match HeaderValue::from_str(origin) {
            Ok(v) => CorsLayer::new().allow_origin(AllowOrigin::exact(v)),
            Err(_) => CorsLayer::new(),
        },
        None => CorsLayer::new().allow_origin(Any),
    }
    .allow_methods(Any)
    .allow_headers(Any);

    Router::new()
        .route("/health", get(health))
        .route("/corpora", post(create_corpus).get(list_corpora))
        .route("/corpora/{id}", get(corpus_summary))
        .route("/corpora/{id}/matrix", get(corpus_matrix))
        .route("/corpora/{id}/query", get(corpus_query))
        .route("/corpora/{id}/exclusive", get(corpus_exclusive))
        .route("/corpora/{id}/sparsity", get(corpus_sparsity))
        .route("/corpora/{id}/factorizations", post(create_factorization))
        .route("/factorizations/{id}", get(get_factorization))
        .route("/factorizations/{id}/topics", get(topics))
        .route("/factorizations/{id}/topics/{g}", patch(rename_topic))
        .route("/factorizations/{id}/residual-curve", get(residual_curve))
        .route("/factorizations/{id}/rank-one/{g}", get(rank_one))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint") })
        .layer(TimeoutLayer::with_status_code(StatusCode::REQUEST_TIMEOUT, config.timeout))
        .layer(cors)
        .layer(TraceLayer::new_for_http())
        .with_state(state)
}

fn find_corpus(store: &SessionStore, id: &str) -> Result<Corpus, ApiError> {
    store.corpus(id).ok_or_else(|| ApiError::not_found("corpus", id))
}

fn find_factorization(store: &SessionStore, id: &str) -> Result<StoredFactorization, ApiError> {
    store
        .factorization(id)
        .ok_or_else(|| ApiError::not_found("factorization", id))
}

async fn health() -> ApiResult {
    ok(&serde_json::json!({"status": "ok"}))
}

/// Build a corpus from a creation request, as both the service and the CLI do.
pub fn corpus_from_request(request: CorpusRequest) -> Result<Corpus, ApiError> {
    match (request.documents, request.matrix) {
        (Some(docs), None) => Ok(build_corpus(docs, request.config.unwrap_or_default())?),
        (None, Some(matrix)) => {
            if request.config.is_some() {
                return Err(ApiError::bad_request(
                    "malformed_request",
                    "config applies to documents, not to a matrix",
                ));
            }
            Ok(Corpus::from_matrix(matrix))
        }
        _ => Err(ApiError::bad_request(
            "malformed_request",
            "give exactly one of \"documents\" or \"matrix\"",
        )),
    }
}

async fn create_corpus(
    State(store): State<AppState>,
    payload: Result<Json<CorpusRequest>, JsonRejection>,
) -> ApiResult {
    let corpus = corpus_from_request(body(payload)?)?;
    let id = store.insert_corpus(corpus.clone())?;
    Ok(json(StatusCode::CREATED, &CorpusSummary::new(id, &corpus)))
}

async fn list_corpora(State(store): State<AppState>) -> ApiResult {
    ok(&store.corpus_ids())
}

async fn corpus_summary(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult {
    ok(&CorpusSummary::new(id.clone(), &find_corpus(&store, &id)?))
}

async fn corpus_matrix(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult {
    ok(&find_corpus(&store, &id)?.matrix)
}

/// Parse `docs=`, `terms=` or `diff=a,b`; exactly one must be present.
pub fn parse_selection(params: &HashMap<String, String>) -> Result<Selection, ApiError> {
    let mut given = params
        .iter()
        .filter(|(k, _)| matches!(k.as_str(), "docs" | "terms" | "diff"));
    let (key, value) = match (given.next(), given.next()) {
        (Some(kv), None) => kv,
        _ => {
            return Err(ApiError::bad_request(
                "malformed_request",
                "give exactly one of docs, terms or diff",
            ))
        }
    };
    let items = split_list(value);
    match key.as_str() {
        "docs" => Ok(Selection::Docs(items)),
        "terms" => Ok(Selection::Terms(items)),
        _ => match <[String; 2]>::try_from(items) {
            Ok([a, b]) => Ok(Selection::Diff(a, b)),
            Err(_) => Err(ApiError::bad_request("malformed_request", "diff takes two documents: diff=A,B")),
        },
    }
}

async fn corpus_query(
    State(store): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult {
    let corpus = find_corpus(&store, &id)?;
    ok(&parse_selection(&params)?.run(&corpus.matrix)?)
}

async fn corpus_exclusive(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult {
    ok(&report::exclusive_terms(&find_corpus(&store, &id)?.matrix))
}

async fn corpus_sparsity(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let corpus = find_corpus(&store, &id)?;
    ok(&Sparsity {
        sparsity: topicforge_core::query::sparsity(&corpus.matrix),
    })
}

async fn create_factorization(
    State(store): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<NmfConfig>, JsonRejection>,
) -> ApiResult {
    let corpus = find_corpus(&store, &id)?;
    let config = body(payload)?;
    let f = tokio::task::spawn_blocking(move || factorize(&corpus.matrix, &config))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    let summary_source = f.clone();
    let fid = store
        .insert_factorization(StoredFactorization::new(id.clone(), f))?
        .ok_or_else(|| ApiError::not_found("corpus", &id))?;
    Ok(json(
        StatusCode::CREATED,
        &FactorizationSummary::new(fid, &summary_source),
    ))
}

async fn get_factorization(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult {
    ok(&find_factorization(&store, &id)?)
}

/// Parse the optional `k` parameter.
pub fn parse_k(params: &HashMap<String, String>) -> Result<usize, ApiError> {
    match params.get("k") {
        None => Ok(DEFAULT_TOP_K),
        Some(k) => k
            .parse()
            .map_err(|_| ApiError::bad_request("malformed_request", format!("k must be a positive integer, got {k:?}"))),
    }
}

async fn topics(
    State(store): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult {
    let stored = find_factorization(&store, &id)?;
    let k = parse_k(&params)?;
    ok(&stored.view()?.report(k)?)
}

async fn rename_topic(
    State(store): State<AppState>,
    Path((id, g)): Path<(String, String)>,
    payload: Result<Json<RenameRequest>, JsonRejection>,
) -> Result<StatusCode, ApiError> {
    let request = body(payload)?;
    store
        .update_factorization(&id, |stored| -> Result<StoredFactorization, ApiError> {
            let view = stored.view()?;
            let topic = view.resolve(&g)?;
            let renamed = view.name_topic(topic, &request.name)?;
            Ok(StoredFactorization {
                topic_names: renamed.names().to_vec(),
                ..stored.clone()
            })
        })
        .ok_or_else(|| ApiError::not_found("factorization", &id))??;
    Ok(StatusCode::NO_CONTENT)
}

async fn residual_curve(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let stored = find_factorization(&store, &id)?;
    ok(&ResidualCurve {
        residual_history: stored.factorization.residual_history,
    })
}

async fn rank_one(State(store): State<AppState>, Path((id, g)): Path<(String, String)>) -> ApiResult {
    let view = find_factorization(&store, &id)?.view()?;
    let topic = view.resolve(&g)?;
    ok(&view.rank_one_term(topic)?)
}

