//! HTTP+JSON service around the customization engine.
//!
//! Models are uploaded as XML and addressed by the SHA-256 digest of their
//! canonical form. Sessions hold one [`Session`] each and are addressed by
//! random UUIDs. Every mutating request on a session runs under that
//! session's lock; models are immutable once stored.
//!
//! | Method | Path | |
//! |---|---|---|
//! | POST | `/models` | upload a variant model (XML body) |
//! | POST | `/models/{id}/documents` | register a model document (XML body) |
//! | GET | `/models/{id}/features` | feature tree |
//! | GET | `/models/{id}/table` | decision table |
//! | POST | `/sessions` | start a session from requirements |
//! | GET | `/sessions/{id}` | session handle |
//! | GET | `/sessions/{id}/decisions` | open decisions |
//! | POST | `/sessions/{id}/decisions` | include or exclude |
//! | POST | `/sessions/{id}/preview` | consequences without applying |
//! | DELETE | `/sessions/{id}/decisions/{ref}` | retract and replay |
//! | POST | `/sessions/{id}/finalize` | configuration and derived artifacts |

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequest, Path, Request, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::configure::{
    apply_requirements, product_model, Consequence, Decision, Requirements, Session,
};
use crate::derive::{derive_decision_table, export_feature_tree, reduce_decision_table, DecisionTable};
use crate::diag::{Code, Diagnostic};
use crate::error::Error;
use crate::io::{
    parse_family_model, parse_model_document, serialize_configuration, serialize_family_model,
    serialize_model_document,
};
use crate::model::{AreaId, FamilyModel, Target, ValueId, VariantId};
use crate::trace::{check_traces, customize_document, ModelDocument};

struct StoredModel {
    model: FamilyModel,
    table: DecisionTable,
    documents: RwLock<Vec<ModelDocument>>,
}

struct SessionEntry {
    model_id: String,
    created_at: u64,
    reduced: DecisionTable,
    session: Session,
}

#[derive(Default)]
pub struct AppState {
    models: RwLock<HashMap<String, Arc<StoredModel>>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionEntry>>>>,
}

/// The service routes over fresh, empty state.
pub fn router() -> Router {
    router_with(Arc::new(AppState::default()))
}

pub fn router_with(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/models", post(upload_model))
        .route("/models/{id}/documents", post(upload_document))
        .route("/models/{id}/features", get(features))
        .route("/models/{id}/table", get(table))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_handle))
        .route("/sessions/{id}/decisions", get(open_decisions).post(decide))
        .route("/sessions/{id}/decisions/{target}", delete(retract))
        .route("/sessions/{id}/preview", post(preview))
        .route("/sessions/{id}/finalize", post(finalize))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}

/// Error response: a status and a diagnostic list.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, diagnostics: Vec<Diagnostic>) -> Self {
        Self {
            status,
            body: json!({ "diagnostics": diagnostics }),
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            vec![Diagnostic::new(Code::UnknownId, id, format!("no {what} `{id}`"))],
        )
    }

    fn bad_request(message: String) -> Self {
        Self::new(
            StatusCode::BAD_REQUEST,
            vec![Diagnostic::new(Code::Syntax, "", message)],
        )
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::PinConflict { .. } | Error::AlternativeConflict { .. } => StatusCode::CONFLICT,
            Error::IncompleteConfiguration(_) => StatusCode::CONFLICT,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self::new(status, e.diagnostics())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult = std::result::Result<Response, ApiError>;

/// JSON body whose rejections are all reported as 400.
pub struct Body<T>(T);

impl<S, T> FromRequest<S> for Body<T>
where
    Json<T>: FromRequest<S, Rejection = JsonRejection>,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        Json::<T>::from_request(req, state)
            .await
            .map(|Json(v)| Body(v))
            .map_err(|e| ApiError::bad_request(e.body_text()))
    }
}

fn ok(body: Value) -> ApiResult {
    Ok((StatusCode::OK, Json(body)).into_response())
}

fn model_digest(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn stored(state: &AppState, id: &str) -> Result<Arc<StoredModel>, ApiError> {
    state
        .models
        .read()
        .expect("model registry poisoned")
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found("model", id))
}

fn session_entry(state: &AppState, id: &str) -> Result<Arc<Mutex<SessionEntry>>, ApiError> {
    state
        .sessions
        .read()
        .expect("session registry poisoned")
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found("session", id))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StateView {
    variant: VariantId,
    state: &'static str,
    selected: Vec<ValueId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cause: Option<Target>,
}

fn configuration_view(session: &Session) -> Vec<StateView> {
    session
        .states()
        .iter()
        .map(|(variant, state)| StateView {
            variant: *variant,
            state: state.token(),
            selected: state.selected().map(|s| s.iter().copied().collect()).unwrap_or_default(),
            cause: state.cause(),
        })
        .collect()
}

#[derive(Serialize)]
struct ConsequenceView {
    #[serde(flatten)]
    consequence: Consequence,
    text: String,
}

fn consequences_view(consequences: &[Consequence]) -> Vec<ConsequenceView> {
    consequences
        .iter()
        .map(|c| ConsequenceView {
            consequence: *c,
            text: c.to_string(),
        })
        .collect()
}

/// The reduced table restricted to variants the session still leaves open.
fn open_table(entry: &SessionEntry) -> DecisionTable {
    let open = entry.session.open_variants();
    entry.reduced.retain(|e| open.contains(&e.variant))
}

async fn upload_model(State(state): State<Arc<AppState>>, body: String) -> ApiResult {
    let model = parse_family_model(body.as_bytes()).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.diagnostics()))?;
    let canonical = serialize_family_model(&model)?;
    let id = model_digest(&canonical);
    let table = derive_decision_table(&model)?;
    state
        .models
        .write()
        .expect("model registry poisoned")
        .entry(id.clone())
        .or_insert_with(|| {
            Arc::new(StoredModel {
                model,
                table,
                documents: RwLock::new(Vec::new()),
            })
        });
    ok(json!({ "modelId": id, "diagnostics": Vec::<Diagnostic>::new() }))
}

async fn upload_document(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: String,
) -> ApiResult {
    let stored = stored(&state, &id)?;
    let doc = parse_model_document(body.as_bytes())?;
    let diagnostics = check_traces(&doc, &stored.model);
    if !diagnostics.is_empty() {
        return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, diagnostics));
    }
    let mut docs = stored.documents.write().expect("document list poisoned");
    let name = doc.name.clone();
    match docs.iter_mut().find(|d| d.name == name) {
        Some(existing) => *existing = doc,
        None => docs.push(doc),
    }
    ok(json!({ "name": name, "diagnostics": Vec::<Diagnostic>::new() }))
}

async fn features(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let stored = stored(&state, &id)?;
    ok(serde_json::to_value(export_feature_tree(&stored.model)?).expect("serializable"))
}

async fn table(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let stored = stored(&state, &id)?;
    ok(serde_json::to_value(&stored.table).expect("serializable"))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateSession {
    model_id: String,
    area: AreaId,
    #[serde(default)]
    pins: Vec<ValueId>,
    #[serde(default)]
    excludes: Vec<VariantId>,
}

async fn create_session(State(state): State<Arc<AppState>>, Body(req): Body<CreateSession>) -> ApiResult {
    let stored = stored(&state, &req.model_id)?;
    let reqs = Requirements {
        area: req.area,
        pins: req.pins.into_iter().collect(),
        excludes: req.excludes.into_iter().collect(),
    };
    let custom = apply_requirements(&stored.model, &reqs)?;
    let session = Session::with_requirements(&stored.model, &reqs)?;
    let reduced = reduce_decision_table(&stored.table, &custom.model, &reqs)?;
    let reduced_xml = if custom.model.variants.is_empty() {
        None
    } else {
        Some(serialize_family_model(&custom.model)?)
    };
    let entry = SessionEntry {
        model_id: req.model_id,
        created_at: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or_default(),
        reduced,
        session,
    };
    let id = uuid::Uuid::new_v4().to_string();
    let body = json!({
        "sessionId": id,
        "modelId": entry.model_id,
        "area": entry.session.area(),
        "reducedModel": reduced_xml,
        "openDecisions": open_table(&entry).entries,
        "configuration": configuration_view(&entry.session),
    });
    state
        .sessions
        .write()
        .expect("session registry poisoned")
        .insert(id, Arc::new(Mutex::new(entry)));
    ok(body)
}

async fn session_handle(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let entry = session_entry(&state, &id)?;
    let entry = entry.lock().expect("session poisoned");
    ok(json!({
        "sessionId": id,
        "modelId": entry.model_id,
        "area": entry.session.area(),
        "createdAt": entry.created_at,
        "log": entry.session.log(),
    }))
}

async fn open_decisions(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let entry = session_entry(&state, &id)?;
    let entry = entry.lock().expect("session poisoned");
    ok(serde_json::to_value(open_table(&entry).entries).expect("serializable"))
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum Action {
    Include,
    Exclude,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecisionRequest {
    action: Action,
    #[serde(rename = "ref")]
    target: String,
}

impl DecisionRequest {
    fn decision(&self) -> Result<Decision, ApiError> {
        let malformed = || ApiError::bad_request(format!("`{}` does not name a {}", self.target, self.kind()));
        match self.action {
            Action::Include => self.target.parse().map(Decision::Include).map_err(|_| malformed()),
            Action::Exclude => self.target.parse().map(Decision::Exclude).map_err(|_| malformed()),
        }
    }

    fn kind(&self) -> &'static str {
        match self.action {
            Action::Include => "value",
            Action::Exclude => "variant",
        }
    }
}

async fn decide(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Body(req): Body<DecisionRequest>,
) -> ApiResult {
    let decision = req.decision()?;
    let entry = session_entry(&state, &id)?;
    let mut entry = entry.lock().expect("session poisoned");
    let outcome = entry.session.apply(decision)?;
    if !outcome.accepted {
        return Ok((
            StatusCode::CONFLICT,
            Json(json!({ "consequences": consequences_view(&outcome.consequences) })),
        )
            .into_response());
    }
    ok(json!({
        "consequences": consequences_view(&outcome.consequences),
        "openDecisions": open_table(&entry).entries,
        "configuration": configuration_view(&entry.session),
    }))
}

async fn preview(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Body(req): Body<DecisionRequest>,
) -> ApiResult {
    let decision = req.decision()?;
    let entry = session_entry(&state, &id)?;
    let entry = entry.lock().expect("session poisoned");
    let outcome = entry.session.preview(decision)?;
    ok(json!({
        "accepted": outcome.accepted,
        "consequences": consequences_view(&outcome.consequences),
    }))
}

async fn retract(
    State(state): State<Arc<AppState>>,
    Path((id, target)): Path<(String, String)>,
) -> ApiResult {
    let decision: Decision = target
        .parse()
        .map_err(|_| ApiError::bad_request(format!("`{target}` is not a decision reference")))?;
    let entry = session_entry(&state, &id)?;
    let mut entry = entry.lock().expect("session poisoned");
    entry
        .session
        .retract(decision)
        .map_err(|_| ApiError::not_found("decision", &target))?;
    ok(json!({
        "openDecisions": open_table(&entry).entries,
        "configuration": configuration_view(&entry.session),
    }))
}

async fn finalize(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let entry = session_entry(&state, &id)?;
    let entry = entry.lock().expect("session poisoned");
    if !entry.session.is_complete() {
        return Ok((
            StatusCode::CONFLICT,
            Json(json!({
                "diagnostics": Error::IncompleteConfiguration(
                    entry.session.open_variants().iter().map(ToString::to_string).collect()
                ).diagnostics(),
                "openDecisions": open_table(&entry).entries,
            })),
        )
            .into_response());
    }
    let stored = stored(&state, &entry.model_id)?;
    let mut config = entry.session.configuration()?;
    config.extend_excluded(&stored.model);

    let reduced = entry.session.model();
    let product = product_model(&stored.model, &config);
    let to_xml = |m: &FamilyModel| -> Result<Option<String>, ApiError> {
        if m.variants.is_empty() {
            Ok(None)
        } else {
            Ok(Some(serialize_family_model(m)?))
        }
    };
    let documents = stored
        .documents
        .read()
        .expect("document list poisoned")
        .iter()
        .map(|doc| {
            let custom = customize_document(doc, &stored.model, &config)?;
            Ok(json!({ "name": custom.name, "xml": serialize_model_document(&custom) }))
        })
        .collect::<Result<Vec<Value>, Error>>()?;
    ok(json!({
        "configuration": serialize_configuration(&config),
        "customizedModel": to_xml(reduced)?,
        "productModel": to_xml(&product)?,
        "documents": documents,
    }))
}
