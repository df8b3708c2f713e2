//! HTTP API.
//!
//! | Method | Path            | Body                               | Success |
//! |--------|-----------------|------------------------------------|---------|
//! | POST   | `/v1/decision`  | request document                   | 200     |
//! | PUT    | `/v1/policies`  | `{"documents": ["<policy text>"]}` | 204     |
//! | PUT    | `/v1/ontologies`| `{"documents": [{...}]}`           | 204     |
//! | GET    | `/v1/health`    |                                    | 200     |

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use serde::Deserialize;
use serde_json::json;
use sxacml::request::RequestContext;

use crate::engine::{Engine, EngineError};

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/v1/decision", post(decision))
        .route("/v1/policies", put(policies))
        .route("/v1/ontologies", put(ontologies))
        .route("/v1/health", get(health))
        .with_state(engine)
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error(status: StatusCode, message: String, diagnostics: serde_json::Value) -> Response {
    let body = json!({ "error": message, "diagnostics": diagnostics });
    json_response(status, format!("{body:#}\n"))
}

async fn decision(State(engine): State<Arc<Engine>>, body: Bytes) -> Response {
    let ctx = match RequestContext::from_json(&body) {
        Ok(ctx) => ctx,
        Err(e) => {
            return error(
                StatusCode::BAD_REQUEST,
                "malformed request".into(),
                json!([e.to_string()]),
            )
        }
    };
    let pdp = engine.snapshot();
    match tokio::task::spawn_blocking(move || pdp.decide(&ctx)).await {
        Ok(decisions) => json_response(StatusCode::OK, decisions.to_document()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string(), json!([])),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Documents<T> {
    documents: Vec<T>,
}

async fn policies(State(engine): State<Arc<Engine>>, body: Bytes) -> Response {
    let docs: Documents<String> = match serde_json::from_slice(&body) {
        Ok(d) => d,
        Err(e) => {
            return error(
                StatusCode::BAD_REQUEST,
                "expected {\"documents\": [string]}".into(),
                json!([e.to_string()]),
            )
        }
    };
    reload(move || engine.replace_policies(&docs.documents)).await
}

async fn ontologies(State(engine): State<Arc<Engine>>, body: Bytes) -> Response {
    let docs: Documents<serde_json::Value> = match serde_json::from_slice(&body) {
        Ok(d) => d,
        Err(e) => {
            return error(
                StatusCode::BAD_REQUEST,
                "expected {\"documents\": [object]}".into(),
                json!([e.to_string()]),
            )
        }
    };
    reload(move || engine.replace_ontologies(&docs.documents)).await
}

async fn reload(job: impl FnOnce() -> Result<(), EngineError> + Send + 'static) -> Response {
    match tokio::task::spawn_blocking(job).await {
        Ok(Ok(())) => StatusCode::NO_CONTENT.into_response(),
        Ok(Err(EngineError::Rejected(problems))) => error(
            StatusCode::UNPROCESSABLE_ENTITY,
            "documents rejected; the previous configuration stays active".into(),
            serde_json::to_value(problems).expect("problems serialize"),
        ),
        Ok(Err(e)) => error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string(), json!([])),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string(), json!([])),
    }
}

async fn health(State(engine): State<Arc<Engine>>) -> Response {
    let pdp = engine.snapshot();
    let body = json!({
        "status": "ok",
        "rules": pdp.policies().rule_count(),
        "axioms": pdp.knowledge_base().len(),
    });
    json_response(StatusCode::OK, format!("{body:#}\n"))
}
