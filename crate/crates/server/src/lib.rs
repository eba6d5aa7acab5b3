//! HTTP front end for the fusalens engine.
//!
//! Every route lives under `/api` and is a pure function of the current
//! store snapshots and the request, so repeating a request against an
//! unchanged store returns byte-identical bodies.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::future::Future;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{FromRequest, Multipart, Path, Query, Request, State};
use axum::http::{header, HeaderValue, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::trace::TraceLayer;

use fusalens::analytics::{self, RuleSet, RuleViolationReport};
use fusalens::compare::{self, SharedCounts};
use fusalens::graph::{ElementRecord, GraphSnapshot, ProjectMeta};
use fusalens::ingest::{self, Issue, ProjectBundle, RecordKind, ValidationReport};
use fusalens::layout::{self, LayoutConfig, Point, SizeBy};
use fusalens::store::{ProjectStore, StoreError};
use fusalens::trace::{self, PathQuery, SecMismatch, TracePath, TraceStep};
use fusalens::{fixtures, Registry};

/// Machine-readable description of every response body.
pub const API_SCHEMA: &str = include_str!("../api-schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogLevel {
    Error,
    Warn,
    Info,
    Debug,
}

impl LogLevel {
    fn as_str(self) -> &'static str {
        match self {
            LogLevel::Error => "error",
            LogLevel::Warn => "warn",
            LogLevel::Info => "info",
            LogLevel::Debug => "debug",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "fusalens-server", version, about = "Functional-safety network analysis service")]
pub struct ServerConfig {
    /// TCP port to listen on.
    #[arg(long, env = "FUSALENS_PORT", default_value_t = 8080)]
    pub port: u16,
    /// Directory holding one sub-directory per project.
    #[arg(long, env = "FUSALENS_DATA_DIR", default_value = "fusalens-data")]
    pub data_dir: PathBuf,
    #[arg(long, value_enum, default_value = "info")]
    pub log_level: LogLevel,
    /// Load the bundled demo projects F1, F2 and F3 at startup.
    #[arg(long)]
    pub seed_demo: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error("cannot use data directory: {0}")]
    Store(#[from] StoreError),
    #[error("cannot create data directory {path}: {source}")]
    DataDir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot bind port {port}: {source}")]
    Bind {
        port: u16,
        #[source]
        source: std::io::Error,
    },
    #[error("server failed: {0}")]
    Serve(#[source] std::io::Error),
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<ProjectStore>,
    pub rules: Arc<RuleSet>,
}

impl AppState {
    pub fn new(store: ProjectStore) -> AppState {
        AppState {
            store: Arc::new(store),
            rules: Arc::new(RuleSet::default()),
        }
    }
}

/// Commits the bundled fixtures that are not already stored, so restarting
/// with a persistent data directory leaves revisions alone.
pub fn seed_demo(store: &ProjectStore) -> Result<(), StoreError> {
    for bundle in fixtures::bundles() {
        if !store.contains(&bundle.meta.project_id) {
            store.commit_bundle(bundle)?;
        }
    }
    Ok(())
}

/// JSON error body: `{"error": ..., "parameter": ..., "details": ...}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameter: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    details: Option<Value>,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> ApiError {
        ApiError {
            status,
            body: ErrorBody {
                error: error.into(),
                parameter: None,
                details: None,
            },
        }
    }

    fn not_found(what: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, what)
    }

    fn bad_param(parameter: &str, problem: impl std::fmt::Display) -> ApiError {
        let mut e = ApiError::new(StatusCode::BAD_REQUEST, format!("invalid parameter `{parameter}`: {problem}"));
        e.body.parameter = Some(parameter.to_string());
        e
    }

    fn with_details(mut self, details: Value) -> ApiError {
        self.body.details = Some(details);
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> ApiError {
        match e {
            StoreError::NotFound(id) => ApiError::not_found(format!("unknown project `{id}`")),
            StoreError::Validation(report) => validation_failed(report),
            other => {
                tracing::error!(error = %other, "store failure");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, other.to_string())
            }
        }
    }
}

fn validation_failed(report: ValidationReport) -> ApiError {
    ApiError {
        status: StatusCode::UNPROCESSABLE_ENTITY,
        body: ErrorBody {
            error: "validation failed".into(),
            parameter: None,
            details: Some(serde_json::to_value(report).expect("report serializes")),
        },
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn app(state: AppState) -> Router {
    let api = Router::new()
        .route("/schema", get(schema))
        .route("/projects", get(list_projects).post(upload_project))
        .route("/projects/{id}/graph", get(project_graph))
        .route("/projects/{id}/layout", get(project_layout))
        .route("/projects/{id}/nodes/search", get(search_nodes))
        .route("/projects/{id}/nodes/{node_id}/neighbors", get(node_neighbors))
        .route("/projects/{id}/checks", get(project_checks))
        .route("/projects/{id}/trace", post(project_trace))
        .route("/summary", get(summary))
        .route("/compare/shared", get(compare_shared))
        .route("/export/csv", post(export_csv));
    Router::new()
        .nest("/api", api)
        .fallback(no_route)
        .layer(TraceLayer::new_for_http())
        .with_state(state)
}

/// Serves on `listener` until `shutdown` resolves. In-flight requests finish
/// before this returns.
pub async fn run(
    listener: tokio::net::TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServerError> {
    axum::serve(listener, app(state))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(ServerError::Serve)
}

/// Creates the data directory if needed, loads stored projects and seeds the
/// demo projects when asked.
pub fn build_state(config: &ServerConfig) -> Result<AppState, ServerError> {
    std::fs::create_dir_all(&config.data_dir).map_err(|source| ServerError::DataDir {
        path: config.data_dir.clone(),
        source,
    })?;
    let store = ProjectStore::open(&config.data_dir, Registry::default())?;
    if config.seed_demo {
        seed_demo(&store)?;
    }
    Ok(AppState::new(store))
}

pub async fn serve(config: ServerConfig) -> Result<(), ServerError> {
    let state = build_state(&config)?;
    let addr = SocketAddr::from((Ipv4Addr::UNSPECIFIED, config.port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServerError::Bind {
            port: config.port,
            source,
        })?;
    tracing::info!(%addr, data_dir = %config.data_dir.display(), "listening");
    run(listener, state, shutdown_signal()).await
}

/// Default `tracing` filter for a configured level; `RUST_LOG` wins if set.
pub fn log_filter(config: &ServerConfig) -> String {
    std::env::var("RUST_LOG").unwrap_or_else(|_| {
        let level = config.log_level.as_str();
        format!("{level},tower_http={level}")
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = terminate => {},
    }
    tracing::info!("shutting down");
}

async fn no_route(method: Method, uri: Uri) -> ApiError {
    ApiError::not_found(format!("no route for {method} {}", uri.path()))
}

async fn schema() -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "application/schema+json")], API_SCHEMA)
}

async fn list_projects(State(state): State<AppState>) -> Json<Vec<fusalens::store::ProjectSummary>> {
    Json(state.store.list_projects())
}

#[derive(Debug, Serialize)]
struct UploadResponse {
    project_id: String,
    revision: u64,
    warnings: Vec<Issue>,
}

/// Accepts either multipart `{meta, nodes, links}` or a JSON project bundle.
async fn upload_project(State(state): State<AppState>, request: Request) -> ApiResult<Response> {
    let is_json = request
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("application/json"));
    let registry = state.store.registry().clone();
    let bundle = if is_json {
        let body = Bytes::from_request(request, &())
            .await
            .map_err(|e| ApiError::bad_param("body", e.body_text()))?;
        ProjectBundle::from_json(&body, &registry).map_err(|e| ApiError::bad_param("body", e))?
    } else {
        let multipart = Multipart::from_request(request, &())
            .await
            .map_err(|e| ApiError::bad_param("body", e.body_text()))?;
        read_multipart(multipart, &registry).await?
    };
    let store = state.store.clone();
    let outcome = tokio::task::spawn_blocking(move || store.commit_bundle(bundle))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let body = UploadResponse {
        project_id: outcome.project_id,
        revision: outcome.revision,
        warnings: outcome.report.warnings,
    };
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn read_multipart(mut multipart: Multipart, registry: &Registry) -> ApiResult<ProjectBundle> {
    let mut parts: HashMap<String, Bytes> = HashMap::new();
    while let Some(field) = multipart
        .next_field()
        .await
        .map_err(|e| ApiError::bad_param("body", e.body_text()))?
    {
        let Some(name) = field.name().map(str::to_string) else {
            continue;
        };
        let name = name.trim_end_matches(".csv").trim_end_matches(".json").to_string();
        let data = field.bytes().await.map_err(|e| ApiError::bad_param(&name, e.body_text()))?;
        parts.insert(name, data);
    }
    let part = |name: &str| {
        parts
            .get(name)
            .ok_or_else(|| ApiError::bad_param(name, "missing multipart field"))
    };
    let meta: ProjectMeta = serde_json::from_slice(part("meta")?).map_err(|e| ApiError::bad_param("meta", e))?;
    let mut report = ValidationReport::default();
    let nodes = ingest::parse_nodes_csv(part("nodes")?).unwrap_or_else(|e| {
        report.errors.push(e.to_issue(RecordKind::Nodes));
        Vec::new()
    });
    let links = ingest::parse_links_csv(part("links")?, registry).unwrap_or_else(|e| {
        report.errors.push(e.to_issue(RecordKind::Links));
        Vec::new()
    });
    if !report.is_ok() {
        return Err(validation_failed(report));
    }
    Ok(ProjectBundle { meta, nodes, links })
}

fn snapshot(state: &AppState, id: &str) -> ApiResult<Arc<GraphSnapshot>> {
    Ok(state.store.get_graph(id)?)
}

async fn project_graph(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = snapshot(&state, &id)?;
    Ok(Json(&*s).into_response())
}

type Params = Query<HashMap<String, String>>;

fn param<'a>(params: &'a HashMap<String, String>, name: &str) -> Option<&'a str> {
    params.get(name).map(String::as_str).filter(|v| !v.trim().is_empty())
}

fn parse_param<T: std::str::FromStr>(params: &HashMap<String, String>, name: &str) -> ApiResult<Option<T>>
where
    T::Err: std::fmt::Display,
{
    param(params, name)
        .map(|v| v.trim().parse::<T>().map_err(|e| ApiError::bad_param(name, e)))
        .transpose()
}

fn list_param(params: &HashMap<String, String>, name: &str) -> Vec<String> {
    param(params, name)
        .map(|v| {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default()
}

async fn project_layout(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Params,
) -> ApiResult<Response> {
    let s = snapshot(&state, &id)?;
    let defaults = LayoutConfig::default();
    let group_by = param(&params, "groupBy").unwrap_or("type").to_string();
    group_by
        .parse::<layout::GroupBy>()
        .map_err(|e| ApiError::bad_param("groupBy", e))?;
    let config = LayoutConfig {
        group_by,
        size_by: parse_param::<SizeBy>(&params, "sizeBy")?.unwrap_or_default(),
        color_by: param(&params, "colorBy").unwrap_or(&defaults.color_by).to_string(),
        seed: parse_param(&params, "seed")?.unwrap_or(defaults.seed),
        ..defaults
    };
    let pinned: Option<BTreeMap<String, Point>> = param(&params, "pinned")
        .map(|p| serde_json::from_str(p).map_err(|e| ApiError::bad_param("pinned", e)))
        .transpose()?;
    let result = tokio::task::spawn_blocking(move || layout::layout_project(&s, &config, pinned.as_ref()))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| ApiError::bad_param("groupBy", e))?;
    Ok(Json(result).into_response())
}

#[derive(Serialize)]
struct NodeList<'a> {
    project_id: &'a str,
    query: &'a str,
    nodes: Vec<&'a ElementRecord>,
}

async fn search_nodes(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Params,
) -> ApiResult<Response> {
    let s = snapshot(&state, &id)?;
    let q = params.get("q").ok_or_else(|| ApiError::bad_param("q", "required"))?;
    Ok(Json(NodeList {
        project_id: s.project_id(),
        query: q,
        nodes: s.search_nodes(q),
    })
    .into_response())
}

#[derive(Serialize)]
struct Neighbors<'a> {
    project_id: &'a str,
    node_id: &'a str,
    relation: Option<&'a str>,
    neighbors: Vec<&'a ElementRecord>,
}

async fn node_neighbors(
    State(state): State<AppState>,
    Path((id, node_id)): Path<(String, String)>,
    Query(params): Params,
) -> ApiResult<Response> {
    let s = snapshot(&state, &id)?;
    let relation = param(&params, "relation");
    let neighbors = s
        .neighbors(&node_id, relation)
        .map_err(|_| ApiError::not_found(format!("unknown node `{node_id}` in project `{id}`")))?;
    Ok(Json(Neighbors {
        project_id: s.project_id(),
        node_id: &node_id,
        relation,
        neighbors,
    })
    .into_response())
}

const CHECKS: [&str; 5] = ["orphans", "degree", "unassigned", "missing", "inheritance"];

#[derive(Serialize)]
struct DegreeResult {
    min: usize,
    /// `None` when unbounded.
    max: Option<usize>,
    node_ids: Vec<String>,
}

#[derive(Serialize)]
struct ChecksResponse<'a> {
    project_id: &'a str,
    revision: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    orphans: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<DegreeResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unassigned: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    missing: Option<RuleViolationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inheritance: Option<Vec<analytics::InheritanceDiscrepancy>>,
}

/// `checks` defaults to orphans, unassigned, missing and inheritance; the
/// degree filter runs when requested or when either bound is given.
async fn project_checks(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Params,
) -> ApiResult<Response> {
    let s = snapshot(&state, &id)?;
    let mut checks: BTreeSet<String> = list_param(&params, "checks").into_iter().collect();
    if let Some(bad) = checks.iter().find(|c| !CHECKS.contains(&c.as_str())) {
        return Err(ApiError::bad_param("checks", format!("unknown check `{bad}`")));
    }
    let degree_min: Option<usize> = parse_param(&params, "degreeMin")?;
    let degree_max: Option<usize> = parse_param(&params, "degreeMax")?;
    if checks.is_empty() {
        checks.extend(["orphans", "unassigned", "missing", "inheritance"].map(String::from));
    }
    if degree_min.is_some() || degree_max.is_some() {
        checks.insert("degree".into());
    }
    let types: BTreeSet<String> = list_param(&params, "types").into_iter().collect();
    let csv = match param(&params, "format") {
        None | Some("json") => false,
        Some("csv") => true,
        Some(other) => return Err(ApiError::bad_param("format", format!("expected json or csv, got `{other}`"))),
    };

    let run = |name: &str| checks.contains(name);
    let degree = if run("degree") {
        let (min, max) = (degree_min.unwrap_or(0), degree_max.unwrap_or(usize::MAX));
        let node_ids = analytics::filter_by_degree(&s, min, max)
            .map_err(|e| ApiError::bad_param(if degree_max.is_some() { "degreeMax" } else { "degreeMin" }, e))?;
        Some(DegreeResult {
            min,
            max: degree_max,
            node_ids,
        })
    } else {
        None
    };
    let response = ChecksResponse {
        project_id: s.project_id(),
        revision: s.revision(),
        orphans: run("orphans").then(|| analytics::find_orphans(&s)),
        degree,
        unassigned: run("unassigned")
            .then(|| analytics::find_unassigned_asil(&s, (!types.is_empty()).then_some(&types))),
        missing: run("missing").then(|| analytics::check_missing_links(&s, &state.rules)),
        inheritance: run("inheritance").then(|| analytics::check_asil_inheritance(&s, &state.rules)),
    };
    if !csv {
        return Ok(Json(response).into_response());
    }
    let p = s.project_id();
    let mut findings = Vec::new();
    if let Some(ids) = &response.orphans {
        findings.extend(analytics::orphan_findings(p, ids));
    }
    if let Some(d) = &response.degree {
        findings.extend(analytics::degree_findings(p, &d.node_ids, d.min, d.max.unwrap_or(usize::MAX)));
    }
    if let Some(ids) = &response.unassigned {
        findings.extend(analytics::unassigned_findings(p, ids));
    }
    if let Some(r) = &response.missing {
        findings.extend(analytics::missing_link_findings(p, r));
    }
    if let Some(found) = &response.inheritance {
        findings.extend(analytics::inheritance_findings(p, found));
    }
    Ok(csv_response(analytics::findings_csv(&findings)))
}

fn csv_response(body: String) -> Response {
    (
        [(header::CONTENT_TYPE, HeaderValue::from_static("text/csv; charset=utf-8"))],
        body,
    )
        .into_response()
}

fn json_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_param("body", e))
}

#[derive(Serialize)]
struct TraceResponse {
    found: bool,
    path: Option<TracePath>,
    steps: Vec<TraceStep>,
    flags: Vec<SecMismatch>,
}

async fn project_trace(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let s = snapshot(&state, &id)?;
    let query: PathQuery = json_body(&body)?;
    let path = trace::find_path(&s, &query).map_err(|e| ApiError::not_found(e.to_string()))?;
    let response = match path {
        Some(path) => {
            let result = trace::trace_asils(&s, &path).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
            TraceResponse {
                found: true,
                path: Some(result.path),
                steps: result.steps,
                flags: result.flags,
            }
        }
        None => TraceResponse {
            found: false,
            path: None,
            steps: Vec::new(),
            flags: Vec::new(),
        },
    };
    Ok(Json(response).into_response())
}

fn projects_param(state: &AppState, params: &HashMap<String, String>, min: usize) -> ApiResult<Vec<Arc<GraphSnapshot>>> {
    let ids = list_param(params, "projects");
    if ids.len() < min {
        return Err(ApiError::bad_param(
            "projects",
            format!("expected at least {min} comma-separated project ids"),
        ));
    }
    let mut seen = BTreeSet::new();
    if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
        return Err(ApiError::bad_param("projects", format!("`{dup}` listed twice")));
    }
    ids.iter().map(|id| snapshot(state, id)).collect()
}

async fn summary(State(state): State<AppState>, Query(params): Params) -> ApiResult<Response> {
    let snaps = projects_param(&state, &params, 1)?;
    let refs: Vec<&GraphSnapshot> = snaps.iter().map(|s| &**s).collect();
    let shared = if refs.len() >= 2 {
        let nodes = compare::shared_nodes(&refs).map_err(|e| ApiError::bad_param("projects", e))?;
        let links = compare::shared_links(&refs).map_err(|e| ApiError::bad_param("projects", e))?;
        Some(SharedCounts::tally(&nodes, &links, refs[0].project_id()))
    } else {
        None
    };
    let table = analytics::summarize(&refs, shared.as_ref(), state.store.registry())
        .map_err(|e| ApiError::bad_param("projects", e))?;
    Ok(Json(table).into_response())
}

async fn compare_shared(State(state): State<AppState>, Query(params): Params) -> ApiResult<Response> {
    let snaps = projects_param(&state, &params, 2)?;
    let refs: Vec<&GraphSnapshot> = snaps.iter().map(|s| &**s).collect();
    let comparison = compare::compare(&refs).map_err(|e| ApiError::bad_param("projects", e))?;
    match param(&params, "format") {
        None | Some("json") => Ok(Json(comparison).into_response()),
        Some("csv") => Ok(csv_response(compare::shared_nodes_csv(
            &comparison.nodes,
            &comparison.projects,
        ))),
        Some(other) => Err(ApiError::bad_param("format", format!("expected json or csv, got `{other}`"))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ExportRequest {
    project: String,
    #[serde(default)]
    node_ids: Vec<String>,
}

fn csv_field(value: &str, always_quote: bool) -> String {
    if always_quote || value.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

/// Selected nodes as CSV with columns `type,asil,name,id`, rows in request
/// order and the free-text name always quoted. Unknown ids are listed in the
/// error.
pub fn export_selection_csv(snapshot: &GraphSnapshot, node_ids: &[String]) -> Result<String, Vec<String>> {
    let unknown: Vec<String> = node_ids.iter().filter(|id| !snapshot.contains(id)).cloned().collect();
    if !unknown.is_empty() {
        return Err(unknown);
    }
    let mut out = String::from("type,asil,name,id\n");
    for id in node_ids {
        let n = snapshot.node(id).expect("checked above");
        let row = [
            csv_field(&n.element_type, false),
            csv_field(n.asil.as_str(), false),
            csv_field(&n.name, true),
            csv_field(&n.id, false),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

async fn export_csv(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let request: ExportRequest = json_body(&body)?;
    let s = snapshot(&state, &request.project)?;
    let csv = export_selection_csv(&s, &request.node_ids).map_err(|unknown| {
        ApiError::bad_param("nodeIds", format!("unknown node ids: {}", unknown.join(", ")))
            .with_details(serde_json::json!({ "unknown": unknown }))
    })?;
    Ok(csv_response(csv))
}
