//! HTTP query service over a loaded [`Workspace`].
//!
//! | method | path | body |
//! |---|---|---|
//! | GET | `/contexts` | |
//! | GET | `/lattices` | |
//! | GET | `/lattices/{id}/concepts` | |
//! | GET | `/lattices/{id}/concepts/{k}` | |
//! | POST | `/lattices/{id}/query` | `{"kind", "elements", "threshold"?}` |
//! | GET | `/lattices/{id}/linkage?mode=ext\|int` | |
//! | GET | `/lattices/{id}/crisp?threshold=t` | |
//! | POST | `/sessions` | `{"lattice", "mode"}` |
//! | GET | `/sessions/{id}` | |
//! | GET | `/sessions/{id}/ranking` | |
//! | POST | `/sessions/{id}/transition` | `{"target"}`, an index or a name |
//! | POST | `/sessions/{id}/scope` | `{"scope"}` |
//! | POST | `/sessions/{id}/mode` | `{"mode"}` |
//!
//! Errors come back as `{"error": {"kind", "message"}}`: 404 for unknown
//! ids, 409 for browsing protocol violations, 422 for bodies or parameters
//! that do not make sense.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use super::{concept_json, crisp_json, linkage_json, query_json, ranking_json, Workspace};
use crate::browsing::{BrowseSession, KnowledgeSystem, Scope};
use crate::context::AttributeToken;
use crate::error::Error;
use crate::linkage::{crispify, linkage_matrix, Mode};

pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(30 * 60);

struct SessionEntry {
    lattice: String,
    session: BrowseSession,
    touched: Instant,
}

#[derive(Default)]
struct Sessions {
    next: u64,
    live: HashMap<String, SessionEntry>,
}

pub struct AppState {
    workspace: Workspace,
    sessions: Mutex<Sessions>,
    ttl: Duration,
}

impl AppState {
    pub fn new(workspace: Workspace) -> AppState {
        AppState::with_ttl(workspace, DEFAULT_SESSION_TTL)
    }

    pub fn with_ttl(workspace: Workspace, ttl: Duration) -> AppState {
        AppState {
            workspace,
            sessions: Mutex::new(Sessions::default()),
            ttl,
        }
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    /// Runs `f` on a live session, refreshing its idle timer. Expired
    /// sessions are dropped first.
    fn with_session<T>(
        &self,
        id: &str,
        f: impl FnOnce(&str, &mut BrowseSession) -> Result<T, ApiError>,
    ) -> Result<T, ApiError> {
        let mut sessions = self.sessions.lock().unwrap_or_else(|p| p.into_inner());
        let now = Instant::now();
        let ttl = self.ttl;
        sessions.live.retain(|_, e| now.duration_since(e.touched) < ttl);
        let entry = sessions
            .live
            .get_mut(id)
            .ok_or_else(|| ApiError::not_found(format!("unknown session `{id}`")))?;
        entry.touched = now;
        f(&entry.lattice, &mut entry.session)
    }

    fn open_session(&self, lattice: String, session: BrowseSession) -> String {
        let mut sessions = self.sessions.lock().unwrap_or_else(|p| p.into_inner());
        let now = Instant::now();
        let ttl = self.ttl;
        sessions.live.retain(|_, e| now.duration_since(e.touched) < ttl);
        sessions.next += 1;
        let id = format!("s{}", sessions.next);
        sessions.live.insert(
            id.clone(),
            SessionEntry {
                lattice,
                session,
                touched: now,
            },
        );
        id
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn not_found(message: String) -> ApiError {
        ApiError {
            status: StatusCode::NOT_FOUND,
            kind: "not_found",
            message,
        }
    }

    fn unprocessable(message: String) -> ApiError {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            kind: "malformed",
            message,
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> ApiError {
        let (status, kind) = match &e {
            Error::WrongMode { .. } => (StatusCode::CONFLICT, "wrong_mode"),
            Error::WrongScope { .. } => (StatusCode::CONFLICT, "wrong_scope"),
            Error::ProtocolViolation(_) => (StatusCode::CONFLICT, "protocol_violation"),
            Error::NotDisplayable(_) => (StatusCode::CONFLICT, "not_displayable"),
            Error::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "io"),
            Error::NotInContext { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "not_in_context"),
            Error::UnknownLabel(_) => (StatusCode::UNPROCESSABLE_ENTITY, "unknown_label"),
            Error::IndexOutOfRange { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "index_out_of_range"),
            Error::ThresholdOutOfRange(_) => (StatusCode::UNPROCESSABLE_ENTITY, "threshold_out_of_range"),
            Error::InvalidToken(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_token"),
            _ => (StatusCode::UNPROCESSABLE_ENTITY, "invalid"),
        };
        ApiError {
            status,
            kind,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": {"kind": self.kind, "message": self.message}});
        (self.status, Json(body)).into_response()
    }
}

type Shared = Arc<AppState>;
type ApiResult = Result<Json<Value>, ApiError>;

fn body<T: for<'de> Deserialize<'de>>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::unprocessable(format!("malformed body: {e}")))
}

fn system<'a>(state: &'a AppState, id: &str) -> Result<&'a Arc<KnowledgeSystem>, ApiError> {
    state
        .workspace
        .lattice(id)
        .ok_or_else(|| ApiError::not_found(format!("unknown lattice `{id}`")))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/contexts", get(list_contexts))
        .route("/lattices", get(list_lattices))
        .route("/lattices/{id}/concepts", get(list_concepts))
        .route("/lattices/{id}/concepts/{k}", get(one_concept))
        .route("/lattices/{id}/query", post(query))
        .route("/lattices/{id}/linkage", get(linkage))
        .route("/lattices/{id}/crisp", get(crisp))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(show_session))
        .route("/sessions/{id}/ranking", get(ranking))
        .route("/sessions/{id}/transition", post(transition))
        .route("/sessions/{id}/scope", post(set_scope))
        .route("/sessions/{id}/mode", post(set_mode))
        .with_state(state)
}

/// Binds and serves until the process is stopped.
pub async fn serve(workspace: Workspace, addr: SocketAddr) -> std::io::Result<()> {
    let app = router(Arc::new(AppState::new(workspace)));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await
}

async fn list_contexts(State(state): State<Shared>) -> Json<Value> {
    let contexts: Vec<Value> = state
        .workspace
        .contexts()
        .map(|(id, type_name, ctx)| {
            json!({
                "id": id,
                "type": type_name,
                "objects": ctx.objects(),
                "attributes": ctx.attributes().iter().map(ToString::to_string).collect::<Vec<_>>(),
            })
        })
        .collect();
    Json(json!({ "contexts": contexts }))
}

async fn list_lattices(State(state): State<Shared>) -> Json<Value> {
    let lattices: Vec<Value> = state
        .workspace
        .lattice_ids()
        .map(|id| {
            let l = state.workspace.lattice(id).expect("listed id").lattice();
            json!({"id": id, "concepts": l.len(), "covers": l.cover_count()})
        })
        .collect();
    Json(json!({ "lattices": lattices }))
}

async fn list_concepts(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let sys = system(&state, &id)?;
    let concepts: Vec<Value> = (0..sys.lattice().len()).map(|k| concept_json(sys, k)).collect();
    Ok(Json(json!({"lattice": id, "concepts": concepts})))
}

async fn one_concept(State(state): State<Shared>, Path((id, k)): Path<(String, String)>) -> ApiResult {
    let sys = system(&state, &id)?;
    let missing = || ApiError::not_found(format!("lattice `{id}` has no concept `{k}`"));
    let index: usize = k.parse().map_err(|_| missing())?;
    if index == 0 || index > sys.lattice().len() {
        return Err(missing());
    }
    Ok(Json(concept_json(sys, index - 1)))
}

#[derive(Deserialize)]
struct QueryBody {
    kind: String,
    elements: Vec<String>,
    threshold: Option<f64>,
}

async fn query(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult {
    let sys = system(&state, &id)?;
    let req: QueryBody = body(&bytes)?;
    let (kind, mut result) = match req.kind.as_str() {
        "intensional" | "int" => {
            let tokens = req
                .elements
                .iter()
                .map(|e| e.parse::<AttributeToken>())
                .collect::<Result<Vec<_>, _>>()?;
            ("intensional", sys.intensional_query(&tokens)?)
        }
        "extensional" | "ext" => {
            let names: Vec<&str> = req.elements.iter().map(String::as_str).collect();
            ("extensional", sys.extensional_query(&names)?)
        }
        other => return Err(ApiError::unprocessable(format!("unknown query kind `{other}`"))),
    };
    if let Some(t) = req.threshold {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::ThresholdOutOfRange(t).into());
        }
        result.ranking = result.ranking.threshold_filter(t);
    }
    Ok(Json(query_json(kind, &result)))
}

async fn linkage(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult {
    let sys = system(&state, &id)?;
    let mode: Mode = params
        .get("mode")
        .map(String::as_str)
        .unwrap_or("ext")
        .parse()
        .map_err(ApiError::unprocessable)?;
    Ok(Json(linkage_json(&linkage_matrix(sys.lattice(), mode))))
}

async fn crisp(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult {
    let sys = system(&state, &id)?;
    let raw = params
        .get("threshold")
        .ok_or_else(|| ApiError::unprocessable("missing `threshold` parameter".into()))?;
    let threshold: f64 = raw
        .parse()
        .map_err(|_| ApiError::unprocessable(format!("threshold `{raw}` is not a number")))?;
    let mode: Mode = params
        .get("mode")
        .map(String::as_str)
        .unwrap_or("ext")
        .parse()
        .map_err(ApiError::unprocessable)?;
    let links = crispify(&linkage_matrix(sys.lattice(), mode), threshold)?;
    Ok(Json(crisp_json(threshold, &links)))
}

fn session_json(id: &str, lattice: &str, s: &BrowseSession) -> Value {
    json!({
        "id": id,
        "lattice": lattice,
        "mode": s.mode().name(),
        "scope": s.scope().name(),
        "state": s.state().map(|k| concept_json(s.system(), k)),
    })
}

#[derive(Deserialize)]
struct CreateSession {
    lattice: String,
    mode: Mode,
}

async fn create_session(State(state): State<Shared>, bytes: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let req: CreateSession = body(&bytes)?;
    let sys = system(&state, &req.lattice)?.clone();
    let id = state.open_session(req.lattice, BrowseSession::new(sys, req.mode));
    let payload = state.with_session(&id, |lattice, s| Ok(session_json(&id, lattice, s)))?;
    Ok((StatusCode::CREATED, Json(payload)))
}

async fn show_session(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult {
    state.with_session(&id, |lattice, s| Ok(Json(session_json(&id, lattice, s))))
}

async fn ranking(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult {
    state.with_session(&id, |_, s| {
        let order = s.ranking()?;
        let kind = match s.scope() {
            Scope::Global => "similarity",
            Scope::Local => "difference",
        };
        Ok(Json(json!({
            "session": id,
            "mode": s.mode().name(),
            "scope": s.scope().name(),
            "kind": kind,
            "state": s.state().map(|k| k + 1),
            "ranking": ranking_json(&order),
        })))
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Target {
    Index(usize),
    Name(String),
}

#[derive(Deserialize)]
struct TransitionBody {
    target: Target,
}

async fn transition(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult {
    let req: TransitionBody = body(&bytes)?;
    state.with_session(&id, |lattice, s| {
        let target = match &req.target {
            Target::Index(0) => {
                return Err(Error::IndexOutOfRange {
                    index: 0,
                    len: s.system().lattice().len(),
                }
                .into())
            }
            Target::Index(k) => k - 1,
            Target::Name(name) => s.system().concept_named(name)?,
        };
        s.transition(target)?;
        Ok(Json(session_json(&id, lattice, s)))
    })
}

#[derive(Deserialize)]
struct ScopeBody {
    scope: Scope,
}

async fn set_scope(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult {
    let req: ScopeBody = body(&bytes)?;
    state.with_session(&id, |lattice, s| {
        s.set_scope(req.scope)?;
        Ok(Json(session_json(&id, lattice, s)))
    })
}

#[derive(Deserialize)]
struct ModeBody {
    mode: Mode,
}

async fn set_mode(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult {
    let req: ModeBody = body(&bytes)?;
    state.with_session(&id, |lattice, s| {
        s.set_mode(req.mode)?;
        Ok(Json(session_json(&id, lattice, s)))
    })
}
