//! JSON-over-HTTP facades. Errors are `{"code", "message"}` bodies.
//!
//! | service | routes |
//! |---|---|
//! | tax service | `POST /sign`, `GET /pubkey` |
//! | verifier | `POST /verify`, `GET /trusted-keys` |
//! | local prover (loopback only) | `GET /document`, `POST /prove` |

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{ConnectInfo, Request, State};
use axum::http::StatusCode;
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Json;
pub use axum::Router;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::Mutex;

use super::redact::{redact_and_prove, DisclosureBundle, DisclosureOptions};
use super::tts::TtsService;
use super::verify::{verify_with_keys, VerdictReport};
use super::{ServiceError, TrustedKeys};
use crate::bundle::SignedDocumentBundle;
use crate::crypto::PublicKey;
use crate::form::{FieldKind, FormTemplate, TaxDocument};
use crate::prover::{ProvingKey, VerifyingKey};

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, code: code.into(), message: message.into() }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let status =
            if e.is_client_error() { StatusCode::UNPROCESSABLE_ENTITY } else { StatusCode::INTERNAL_SERVER_ERROR };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "code": self.code, "message": self.message }))).into_response()
    }
}

/// Rejects malformed JSON bodies with the error envelope instead of axum's
/// plain-text default.
struct JsonBody<T>(T);

#[axum::async_trait]
impl<S: Send + Sync, T: serde::de::DeserializeOwned> axum::extract::FromRequest<S> for JsonBody<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(JsonBody(v)),
            Err(e) => Err(ApiError::new(StatusCode::BAD_REQUEST, "INVALID_REQUEST", e.body_text())),
        }
    }
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "NOT_FOUND", "no such endpoint")
}

#[derive(Deserialize)]
struct SignRequest {
    document: TaxDocument,
    template_id: String,
}

#[derive(Serialize, Deserialize)]
pub struct PubkeyResponse {
    pub label: String,
    pub pk: PublicKey,
}

pub fn tts_router(service: Arc<TtsService>) -> Router {
    async fn sign(
        State(s): State<Arc<TtsService>>,
        JsonBody(req): JsonBody<SignRequest>,
    ) -> Result<Json<SignedDocumentBundle>, ApiError> {
        Ok(Json(s.sign(&req.document, &req.template_id)?))
    }
    async fn pubkey(State(s): State<Arc<TtsService>>) -> Json<PubkeyResponse> {
        Json(PubkeyResponse { label: s.label.clone(), pk: s.public_key() })
    }
    Router::new().route("/sign", post(sign)).route("/pubkey", get(pubkey)).fallback(not_found).with_state(service)
}

pub struct VerifyState {
    pub keys: Vec<VerifyingKey>,
    pub trusted: TrustedKeys,
}

pub fn verify_router(state: Arc<VerifyState>) -> Router {
    async fn verify(State(s): State<Arc<VerifyState>>, JsonBody(d): JsonBody<DisclosureBundle>) -> Json<VerdictReport> {
        let report = tokio::task::spawn_blocking(move || verify_with_keys(&d, &s.keys, &s.trusted))
            .await
            .expect("verification does not panic");
        Json(report)
    }
    async fn trusted_keys(State(s): State<Arc<VerifyState>>) -> Json<TrustedKeys> {
        Json(s.trusted.clone())
    }
    Router::new()
        .route("/verify", post(verify))
        .route("/trusted-keys", get(trusted_keys))
        .fallback(not_found)
        .with_state(state)
}

pub struct LocalState {
    pub bundle: SignedDocumentBundle,
    pub template: FormTemplate,
    pub proving_key: Arc<ProvingKey>,
    pub options: DisclosureOptions,
    /// One proof at a time; proving is memory-bound.
    pub busy: Mutex<()>,
}

#[derive(Serialize, Deserialize)]
pub struct DocumentField {
    pub key: String,
    pub label: String,
    pub kind: FieldKind,
    pub value: String,
}

#[derive(Serialize, Deserialize)]
pub struct DocumentView {
    pub template_id: String,
    pub fields: Vec<DocumentField>,
    pub year: Option<String>,
    pub form: Option<String>,
}

#[derive(Deserialize)]
struct ProveRequest {
    redact_keys: BTreeSet<String>,
}

pub fn local_router(state: Arc<LocalState>) -> Router {
    async fn document(State(s): State<Arc<LocalState>>) -> Json<DocumentView> {
        let doc = &s.bundle.document;
        Json(DocumentView {
            template_id: s.template.id(),
            fields: s
                .template
                .fields
                .iter()
                .map(|f| DocumentField {
                    key: f.key.clone(),
                    label: f.label.clone(),
                    kind: f.kind,
                    value: doc.get(&f.key).unwrap_or("").to_string(),
                })
                .collect(),
            year: doc.year.clone(),
            form: doc.form.clone(),
        })
    }
    async fn prove(
        State(s): State<Arc<LocalState>>,
        JsonBody(req): JsonBody<ProveRequest>,
    ) -> Result<Json<DisclosureBundle>, ApiError> {
        let _guard = s.busy.lock().await;
        let state = s.clone();
        let result = tokio::task::spawn_blocking(move || {
            redact_and_prove(&state.bundle, &req.redact_keys, &state.template, &state.proving_key, state.options)
        })
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string()))?;
        Ok(Json(result?))
    }
    Router::new()
        .route("/document", get(document))
        .route("/prove", post(prove))
        .fallback(not_found)
        .layer(middleware::from_fn(loopback_only))
        .with_state(state)
}

async fn loopback_only(ConnectInfo(peer): ConnectInfo<SocketAddr>, req: Request, next: Next) -> Response {
    if !peer.ip().is_loopback() {
        return ApiError::new(StatusCode::FORBIDDEN, "FORBIDDEN", "only loopback clients are served").into_response();
    }
    next.run(req).await
}

pub fn ensure_loopback(addr: &SocketAddr) -> Result<(), ServiceError> {
    if addr.ip().is_loopback() {
        Ok(())
    } else {
        Err(ServiceError::InvalidRequest(format!("{addr} is not a loopback address")))
    }
}

/// Binds `addr`, reports the bound address, and serves until Ctrl-C.
pub async fn serve(router: Router, addr: SocketAddr, on_bound: impl FnOnce(SocketAddr)) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, router.into_make_service_with_connect_info::<SocketAddr>())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
