mod common;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use matra::core::engine::assessable_pairs;
use matra::io::load_model;
use matra::service::{self, router, Api, CONTENT_TYPE};
use proptest::prelude::*;
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tower::ServiceExt;

fn api() -> Api {
    Api::new(common::model())
}

async fn get(api: &Api, uri: &str) -> (StatusCode, String) {
    let request = Request::get(uri).body(Body::empty()).unwrap();
    let response = router(api.clone()).oneshot(request).await.unwrap();
    let status = response.status();
    assert_eq!(response.headers()["content-type"], CONTENT_TYPE);
    let body = to_bytes(response.into_body(), usize::MAX).await.unwrap();
    (status, String::from_utf8(body.to_vec()).unwrap())
}

fn json(body: &str) -> serde_json::Value {
    serde_json::from_str(body).unwrap()
}

#[tokio::test]
async fn assess_with_empty_control_set() {
    let (status, body) = get(&api(), "/assess?scenario=IS6&source=malicious-customer&controls=").await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v["risk"]["score"], 9);
    assert_eq!(v["risk"]["label"], "very_high");
    assert_eq!(v["configuration"], "ad-hoc");
}

#[tokio::test]
async fn assess_with_ad_hoc_controls() {
    let api = api();
    let (_, body) = get(&api, "/assess?scenario=IS6&source=malicious-customer&controls=docker-sandbox").await;
    let v = json(&body);
    assert_eq!(v["risk"]["score"], 9);
    let curl = v["vector_scores"].as_array().unwrap().iter().find(|s| s["vector"] == "is6-curl").unwrap();
    assert_eq!(curl["combined"], "low");

    let (_, body) = get(
        &api,
        "/assess?scenario=IS5&source=competitor&controls=query-timeout,query-cost-validation,connection-limit",
    )
    .await;
    assert_eq!(json(&body)["risk"]["score"], 3);
}

#[tokio::test]
async fn unknown_ids_are_404() {
    let api = api();
    for (uri, code) in [
        ("/assess?scenario=IS6&source=nosuch", "unknown-source"),
        ("/assess?scenario=IS60&source=competitor", "unknown-scenario"),
        ("/assess?scenario=IS6&source=competitor&controls=moat", "unknown-control"),
        ("/assess?scenario=IS6&source=competitor&config=castle", "unknown-configuration"),
        ("/whatif?scenario=IS6&source=competitor&base=default&alt=castle", "unknown-configuration"),
        ("/nowhere", "not-found"),
    ] {
        let (status, body) = get(&api, uri).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{uri}");
        assert_eq!(json(&body)["error"], code, "{uri}");
    }
}

#[tokio::test]
async fn malformed_queries_are_400() {
    let api = api();
    for uri in [
        "/assess",
        "/assess?scenario=IS6",
        "/assess?scenario=IS6&source=competitor&colour=red",
        "/assess?scenario=IS6&source=competitor&source=competitor",
        "/assess?scenario=IS6&source=competitor&config=default&controls=",
        "/whatif?scenario=IS6&source=competitor&base=default",
        "/model?full=1",
    ] {
        let (status, body) = get(&api, uri).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{uri}");
        assert_eq!(json(&body)["error"], "bad-query");
    }
}

#[tokio::test]
async fn unassessable_pairs_are_422() {
    let api = api();
    let (status, body) = get(&api, "/assess?scenario=IS6&source=accidental&controls=").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(json(&body)["error"], "out-of-scope");
    let (status, body) = get(&api, "/assess?scenario=IS8&source=competitor&controls=").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(json(&body)["error"], "no-tree");
}

#[tokio::test]
async fn writes_are_refused() {
    let request = Request::post("/assess").body(Body::empty()).unwrap();
    let response = router(api()).oneshot(request).await.unwrap();
    assert_eq!(response.status(), StatusCode::METHOD_NOT_ALLOWED);
}

#[tokio::test]
async fn model_round_trips() {
    let (status, body) = get(&api(), "/model").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, matra::OPENCLAW_MODEL);
    assert_eq!(load_model(body.as_bytes()).unwrap(), common::model());
}

#[tokio::test]
async fn scenarios_listing() {
    let (_, body) = get(&api(), "/scenarios").await;
    let v = json(&body);
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 9);
    let is6 = list.iter().find(|s| s["id"] == "IS6").unwrap();
    let sources = is6["assessable_sources"].as_array().unwrap();
    assert!(!sources.iter().any(|s| s == "accidental"));
    assert_eq!(sources.len(), 3);
    let is8 = list.iter().find(|s| s["id"] == "IS8").unwrap();
    assert_eq!(is8["assessable_sources"], serde_json::json!(["accidental"]));
    let is1 = list.iter().find(|s| s["id"] == "IS1").unwrap();
    assert_eq!(is1["assessable_sources"], serde_json::json!([]));
}

#[tokio::test]
async fn whatif_reports_the_delta() {
    let api = api();
    let (status, body) = get(&api, "/whatif?scenario=IS5&source=competitor&base=default&alt=guardrails").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json(&body)["score_delta"], -6);
    let (_, body) = get(&api, "/whatif?scenario=IS8&source=accidental&base=default&alt=read-only").await;
    assert_eq!(json(&body)["score_delta"], -3);
    let (_, body) = get(&api, "/whatif?scenario=IS8&source=accidental&base_controls=&alt=default").await;
    assert_eq!(json(&body)["score_delta"], 0);
}

fn cli(args: &[&str]) -> (i32, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let status = matra::cli::run(args.iter().copied(), &mut out, &mut err);
    (status.code(), String::from_utf8(out).unwrap())
}

#[test]
fn cli_and_http_agree_byte_for_byte() {
    let model = common::model();
    let api = Api::new(model.clone());
    let path = common::model_path();
    let path = path.to_str().unwrap();
    for (scenario, source) in assessable_pairs(&model) {
        for c in &model.configurations {
            let (code, out) =
                cli(&["matra", "assess", path, "--scenario", &scenario, "--source", &source, "--config", &c.id]);
            assert_eq!(code, 0);
            let query = format!("scenario={scenario}&source={source}&config={}", c.id);
            let http = api.get("/assess", Some(&query));
            assert_eq!(http.status, 200);
            assert_eq!(out, http.body, "{query}");

            let controls = c.enabled_controls.join(",");
            let (_, out) =
                cli(&["matra", "assess", path, "--scenario", &scenario, "--source", &source, "--controls", &controls]);
            let http = api.get("/assess", Some(&format!("scenario={scenario}&source={source}&controls={controls}")));
            assert_eq!(out, http.body);
        }
    }
    let (_, out) = cli(&[
        "matra",
        "whatif",
        path,
        "--scenario",
        "IS6",
        "--source",
        "competitor",
        "--base",
        "default",
        "--alt",
        "sandbox",
        "--format",
        "json",
    ]);
    assert_eq!(out, api.get("/whatif", Some("scenario=IS6&source=competitor&base=default&alt=sandbox")).body);
}

fn replay_requests() -> Vec<String> {
    let mut out = vec!["/model".to_string(), "/scenarios".to_string(), "/nowhere".to_string()];
    for (sc, src) in assessable_pairs(&common::model()) {
        out.push(format!("/assess?scenario={sc}&source={src}&config=default"));
        out.push(format!("/assess?scenario={sc}&source={src}&controls=docker-sandbox,read-only-db-role"));
        out.push(format!("/whatif?scenario={sc}&source={src}&base=default&alt=guardrails"));
    }
    out.push("/assess?scenario=IS6&source=accidental&controls=".into());
    out.push("/assess?scenario=IS6".into());
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn request_order_does_not_matter(order in Just((0..replay_requests().len()).collect::<Vec<_>>()).prop_shuffle()) {
        let requests = replay_requests();
        let fresh = api();
        let expected: Vec<_> = requests.iter().map(|r| split_get(&fresh, r)).collect();
        let shared = api();
        for i in order {
            prop_assert_eq!(&split_get(&shared, &requests[i]), &expected[i]);
        }
    }
}

fn split_get(api: &Api, uri: &str) -> matra::service::ApiResponse {
    match uri.split_once('?') {
        Some((path, query)) => api.get(path, Some(query)),
        None => api.get(uri, None),
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_match_sequential_answers() {
    let api = api();
    let requests = replay_requests();
    let expected: Vec<_> = requests.iter().map(|r| split_get(&api, r).body).collect();
    let mut handles = Vec::new();
    for _ in 0..4 {
        for r in requests.iter().rev() {
            let (api, r) = (api.clone(), r.clone());
            handles.push(tokio::spawn(async move { get(&api, &r).await.1 }));
        }
    }
    let mut bodies = Vec::new();
    for h in handles {
        bodies.push(h.await.unwrap());
    }
    for (i, body) in bodies.iter().enumerate() {
        let idx = requests.len() - 1 - (i % requests.len());
        assert_eq!(body, &expected[idx]);
    }
}

async fn raw_get(addr: std::net::SocketAddr, uri: &str) -> String {
    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    let req = format!("GET {uri} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n");
    stream.write_all(req.as_bytes()).await.unwrap();
    let mut out = String::new();
    stream.read_to_string(&mut out).await.unwrap();
    out
}

#[tokio::test]
async fn serves_over_a_real_socket() {
    let listener = service::bind("127.0.0.1:0".parse().unwrap()).await.unwrap();
    let addr = listener.local_addr().unwrap();
    let server = tokio::spawn(service::serve(api(), listener));

    let response = raw_get(addr, "/assess?scenario=IS6&source=malicious-customer&controls=").await;
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("content-type: application/json"));
    let body = response.split_once("\r\n\r\n").unwrap().1;
    assert_eq!(json(body)["risk"]["score"], 9);

    let response = raw_get(addr, "/assess?scenario=IS6&source=nosuch").await;
    assert!(response.starts_with("HTTP/1.1 404"), "{response}");
    server.abort();
}

#[tokio::test]
async fn bind_failure_is_reported() {
    let first = service::bind("127.0.0.1:0".parse().unwrap()).await.unwrap();
    let addr = first.local_addr().unwrap();
    let err = service::bind(addr).await.unwrap_err();
    assert!(err.to_string().contains(&addr.to_string()));
}
