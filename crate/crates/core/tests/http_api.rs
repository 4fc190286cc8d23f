use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use scentplan_core::demo::DemoBundle;
use scentplan_core::harness::http::{router, AppState};
use scentplan_core::harness::{blinding_leaks, Harness, StimulusSet, StudyConfig};
use scentplan_core::Strategy;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app(dir: &std::path::Path, token: Option<&str>) -> Router {
    let clips = DemoBundle::builtin().clip_ids();
    let mut stimuli = StimulusSet::default();
    for clip in &clips {
        for s in Strategy::ALL {
            stimuli.insert(clip, s, format!("Scent plan: 1 cue\n0:00–0:05 — lemon, {} intensity, steady", ["low", "medium", "high"][s as usize]));
        }
        let file = dir.join(format!("{clip}.mp4"));
        std::fs::write(&file, b"fake video bytes").unwrap();
        stimuli.clip_files.insert(clip.clone(), file);
    }
    let harness = Harness::open(
        &dir.join("store"),
        vec![StudyConfig::study1(clips.clone(), 9), StudyConfig::study2(clips[..3].to_vec(), 9)],
        stimuli,
    )
    .unwrap();
    router(AppState {
        harness: Arc::new(harness),
        admin_token: token.map(String::from),
        export_dir: Some(dir.join("exports")),
    })
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, String) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8_lossy(&bytes).into_owned())
}

fn post(uri: &str, body: Value) -> Request<Body> {
    Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap()
}

fn get(uri: &str) -> Request<Body> {
    Request::get(uri).body(Body::empty()).unwrap()
}

#[tokio::test]
async fn study1_session_over_http() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path(), Some("secret"));

    let (status, body) = send(&app, post("/api/session", json!({"study_id": "study1", "participant_id": "web-1"}))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert!(blinding_leaks(&body).is_empty());
    let session: Value = serde_json::from_str(&body).unwrap();
    let id = session["session_id"].as_str().unwrap().to_string();
    assert_eq!(session["question_count"], 10);

    for n in 1..=10 {
        let (status, body) = send(&app, get(&format!("/api/session/{id}/task/{n}"))).await;
        assert_eq!(status, StatusCode::OK);
        assert!(blinding_leaks(&body).is_empty(), "{body}");
        let task: Value = serde_json::from_str(&body).unwrap();
        assert_eq!(task["plans"].as_array().unwrap().len(), 3);
        assert_eq!(task["kind"], "rank");
        let (status, body) = send(
            &app,
            post(&format!("/api/session/{id}/response"), json!({"question": n, "ranking": [2, 0, 1], "free_text": "ok"})),
        )
        .await;
        assert_eq!(status, StatusCode::OK, "{body}");
        let ack: Value = serde_json::from_str(&body).unwrap();
        assert_eq!(ack["completed"], n == 10);
    }

    let (status, _) = send(&app, post(&format!("/api/session/{id}/response"), json!({"question": 1, "ranking": [0, 1, 2]}))).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (status, _) = send(&app, get("/api/export/study1")).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    let bad = Request::get("/api/export/study1").header(header::AUTHORIZATION, "Bearer nope").body(Body::empty()).unwrap();
    assert_eq!(send(&app, bad).await.0, StatusCode::UNAUTHORIZED);
    let good = Request::get("/api/export/study1").header(header::AUTHORIZATION, "Bearer secret").body(Body::empty()).unwrap();
    let (status, body) = send(&app, good).await;
    assert_eq!(status, StatusCode::OK);
    let export: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(export["dataset"].as_array().unwrap().len(), 1);
    assert!(dir.path().join("exports/study1.dataset.jsonl").is_file());
}

#[tokio::test]
async fn error_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path(), None);
    let (status, _) = send(&app, post("/api/session", json!({"study_id": "study9", "participant_id": "x"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(send(&app, get("/api/session/missing/task/1")).await.0, StatusCode::NOT_FOUND);

    let (_, body) = send(&app, post("/api/session", json!({"study_id": "study1", "participant_id": "x"}))).await;
    let id = serde_json::from_str::<Value>(&body).unwrap()["session_id"].as_str().unwrap().to_string();
    assert_eq!(send(&app, get(&format!("/api/session/{id}/task/11"))).await.0, StatusCode::NOT_FOUND);
    let (status, body) = send(&app, post(&format!("/api/session/{id}/response"), json!({"question": 1, "ranking": [0, 0, 1]}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body.contains("not a permutation"));

    // export is disabled without a configured token
    assert_eq!(send(&app, get("/api/export/study1")).await.0, StatusCode::SERVICE_UNAVAILABLE);
}

#[tokio::test]
async fn clips_are_served() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path(), None);
    let (status, body) = send(&app, get("/clips/kitchen-01")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, "fake video bytes");
    assert_eq!(send(&app, get("/clips/unknown")).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn study2_rating_over_http() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path(), Some("t"));
    let (_, body) = send(&app, post("/api/session", json!({"study_id": "study2", "participant_id": "r"}))).await;
    let id = serde_json::from_str::<Value>(&body).unwrap()["session_id"].as_str().unwrap().to_string();
    let (_, body) = send(&app, get(&format!("/api/session/{id}/task/1"))).await;
    let task: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(task["kind"], "rate");
    assert_eq!(task["likert_items"].as_array().unwrap().len(), 4);
    assert!(task["likert_items"].as_array().unwrap().iter().all(|i| i["scale_points"] == 7));
    for n in 1..=3 {
        let likert = json!({"immersion": [6, 4], "distraction": [2, 5], "coherence": [6, 3], "easy_to_imagine": [5, 5]});
        let (status, body) = send(
            &app,
            post(&format!("/api/session/{id}/response"), json!({"question": n, "likert": likert, "preference": 0})),
        )
        .await;
        assert_eq!(status, StatusCode::OK, "{body}");
    }
    let req = Request::get("/api/export/study2").header(header::AUTHORIZATION, "Bearer t").body(Body::empty()).unwrap();
    let (_, body) = send(&app, req).await;
    let export: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(export["exclusions"]["included"], 1);
}
