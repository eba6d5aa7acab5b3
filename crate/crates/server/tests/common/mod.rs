#![allow(dead_code)]

use axum::body::{to_bytes, Body};
use axum::http::{header, Request, StatusCode};
use axum::Router;
use fusalens::store::ProjectStore;
use fusalens::Registry;
use fusalens_server::{app, seed_demo, AppState, API_SCHEMA};
use serde_json::{json, Value};
use tower::ServiceExt;

pub struct Reply {
    pub status: StatusCode,
    pub content_type: String,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("body is not JSON ({e}): {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).expect("UTF-8 body")
    }
}

pub fn demo_app() -> Router {
    let store = ProjectStore::in_memory(Registry::default());
    seed_demo(&store).expect("fixtures commit");
    app(AppState::new(store))
}

pub async fn send(app: &Router, request: Request<Body>) -> Reply {
    let response = app.clone().oneshot(request).await.expect("infallible service");
    let status = response.status();
    let content_type = response
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or_default()
        .to_string();
    let body = to_bytes(response.into_body(), usize::MAX).await.expect("body").to_vec();
    Reply {
        status,
        content_type,
        body,
    }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

pub async fn post_json(app: &Router, uri: &str, body: Value) -> Reply {
    let request = Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    send(app, request).await
}

pub const BOUNDARY: &str = "fusalens-test-boundary";

/// A `multipart/form-data` body with one part per `(name, content)`.
pub fn multipart(parts: &[(&str, &str)]) -> Request<Body> {
    let mut body = String::new();
    for (name, content) in parts {
        body.push_str(&format!(
            "--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"{name}\"; filename=\"{name}\"\r\n\r\n{content}\r\n"
        ));
    }
    body.push_str(&format!("--{BOUNDARY}--\r\n"));
    Request::post("/api/projects")
        .header(header::CONTENT_TYPE, format!("multipart/form-data; boundary={BOUNDARY}"))
        .body(Body::from(body))
        .unwrap()
}

/// Validator for one named definition of the published interface document.
pub fn validator(definition: &str) -> jsonschema::Validator {
    let mut doc: Value = serde_json::from_str(API_SCHEMA).expect("schema is JSON");
    assert!(doc["$defs"].get(definition).is_some(), "no definition {definition}");
    doc["$ref"] = json!(format!("#/$defs/{definition}"));
    jsonschema::validator_for(&doc).expect("schema compiles")
}

/// Schema violations of `value` against `definition`, empty when valid.
pub fn schema_errors(definition: &str, value: &Value) -> Vec<String> {
    validator(definition)
        .iter_errors(value)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect()
}

pub fn assert_schema(definition: &str, value: &Value) {
    let errors = schema_errors(definition, value);
    assert!(errors.is_empty(), "{definition} violations: {errors:#?}\n{value:#}");
}
