//! Drives the HTTP service in-process: upload, start a session, answer one
//! question, try a contradicting answer and finalize.
//!
//! `famvar serve --port 8080` exposes the same routes over TCP.

use axum::body::Body;
use axum::http::{Method, Request};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: Method, uri: &str, body: String) -> (u16, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status().as_u16();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::main(flavor = "current_thread")]
async fn main() {
    let app = famvar::service::router();

    let model = include_str!("../fixtures/hall_booking.xml").to_owned();
    let (_, uploaded) = call(&app, Method::POST, "/models", model).await;
    let model_id = uploaded["modelId"].as_str().unwrap().to_owned();
    println!("model {model_id}");

    let document = include_str!("../fixtures/reserve_hall_activity.xml").to_owned();
    call(&app, Method::POST, &format!("/models/{model_id}/documents"), document).await;

    let start = json!({ "modelId": model_id, "area": "Academic", "pins": ["V4.3"] });
    let (_, session) = call(&app, Method::POST, "/sessions", start.to_string()).await;
    let id = session["sessionId"].as_str().unwrap().to_owned();
    println!("open decisions: {}", session["openDecisions"]);

    let decide = |r: &str| json!({ "action": "include", "ref": r }).to_string();
    let (status, body) = call(&app, Method::POST, &format!("/sessions/{id}/decisions"), decide("V3.2")).await;
    println!("include V3.2 -> {status}: {}", body["consequences"]);
    let (status, body) = call(&app, Method::POST, &format!("/sessions/{id}/decisions"), decide("V1.1")).await;
    println!("include V1.1 -> {status}: {}", body["consequences"]);

    let (status, body) = call(&app, Method::POST, &format!("/sessions/{id}/finalize"), String::new()).await;
    println!("finalize -> {status}");
    println!("{}", body["configuration"].as_str().unwrap_or_default());
    println!("{}", body["documents"][0]["xml"].as_str().unwrap_or_default());
}
