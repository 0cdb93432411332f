use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ltqp_align::fixture::{generate, FixtureConfig, FixtureSet, QUERY_NAMES, USER_INFORMATION};
use ltqp_align::rdf::parse_turtle;
use ltqp_align::source::{HttpSource, DEFAULT_HTTP_TIMEOUT};
use ltqp_align::traversal::{event_order_ok, execute, ExecutionReport, ProgressEvent};
use ltqp_align_server::{AppState, Server};
use reqwest::StatusCode;
use serde_json::{json, Value};

struct Running {
    state: Arc<AppState>,
    client: reqwest::Client,
}

impl Running {
    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.state.origin())
    }

    async fn post(&self, body: Value) -> (StatusCode, Value) {
        let r = self.client.post(self.url("/api/executions")).json(&body).send().await.unwrap();
        let status = r.status();
        (status, r.json().await.unwrap_or(Value::Null))
    }

    async fn start(&self, body: Value) -> String {
        let (status, v) = self.post(body).await;
        assert_eq!(status, StatusCode::ACCEPTED, "{v}");
        v["id"].as_str().unwrap().to_owned()
    }

    async fn events(&self, id: &str) -> Vec<ProgressEvent> {
        let text = self.client.get(self.url(&format!("/api/executions/{id}/events"))).send().await.unwrap().text().await.unwrap();
        text.lines()
            .filter_map(|l| l.strip_prefix("data:"))
            .map(|d| serde_json::from_str(d.trim_start()).unwrap())
            .collect()
    }

    async fn finished(&self, id: &str) -> Value {
        let deadline = Instant::now() + Duration::from_secs(60);
        loop {
            let v: Value = self.client.get(self.url(&format!("/api/executions/{id}"))).send().await.unwrap().json().await.unwrap();
            if v["status"] != "running" {
                return v;
            }
            assert!(Instant::now() < deadline, "execution {id} did not finish");
            tokio::time::sleep(Duration::from_millis(20)).await;
        }
    }
}

async fn serve() -> Running {
    let fixtures = vec![
        generate(&FixtureConfig::base_network(7)).unwrap(),
        generate(&FixtureConfig::heterogeneous(7)).unwrap(),
    ];
    let server = Server::bind(SocketAddr::from(([127, 0, 0, 1], 0)), fixtures, None).await.unwrap();
    let state = server.state();
    tokio::spawn(server.run());
    Running {
        state,
        client: reqwest::Client::new(),
    }
}

fn network(r: &Running, name: &str) -> FixtureSet {
    r.state.network(name).unwrap().clone()
}

#[tokio::test(flavor = "multi_thread")]
async fn pods_are_served_as_turtle() {
    let r = serve().await;
    let fx = network(&r, "heterogeneous");
    let card = format!("{}u0/card", fx.base());
    assert!(card.starts_with(r.state.origin()));
    let resp = r.client.get(&card).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.headers()["content-type"], "text/turtle");
    let body = resp.text().await.unwrap();
    assert_eq!(parse_turtle(&body, &card).unwrap(), parse_turtle(&fx.documents[&card], &card).unwrap());
    for missing in ["/pods/heterogeneous/u99/card", "/pods/nowhere/u0/card"] {
        assert_eq!(r.client.get(r.url(missing)).send().await.unwrap().status(), StatusCode::NOT_FOUND);
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn catalog_endpoints() {
    let r = serve().await;
    let networks: Value = r.client.get(r.url("/api/networks")).send().await.unwrap().json().await.unwrap();
    let names: Vec<&str> = networks.as_array().unwrap().iter().map(|n| n["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["base", "heterogeneous"]);
    assert_eq!(networks[0]["ruleSetCount"], 0);
    assert_eq!(networks[1]["ruleSetCount"], 4);
    let queries: Value = r.client.get(r.url("/api/queries")).send().await.unwrap().json().await.unwrap();
    let queries = queries.as_array().unwrap();
    assert_eq!(queries.len(), 2 * QUERY_NAMES.len());
    assert!(queries.iter().all(|q| q["text"].is_string() && q["seeds"].is_array()));
}

#[tokio::test(flavor = "multi_thread")]
async fn invalid_requests_are_refused() {
    let r = serve().await;
    let (status, body) = r.post(json!({"queryText": "SELECT ?x WHERE { ?x ?p }"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["position"].is_u64(), "{body}");
    let (status, _) = r.post(json!({"queryName": "No such query"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = r.post(json!({"queryName": USER_INFORMATION, "queryText": "SELECT * WHERE { ?s ?p ?o }"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = r.post(json!({"queryName": USER_INFORMATION, "network": "elsewhere"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = r
        .post(json!({"queryName": USER_INFORMATION, "issuerRules": [{"subject": "a", "relation": "sameAs", "object": "http://x/b"}]}))
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = r.post(json!({"queryText": format!("SELECT * WHERE {{ ?s ?p \"{}\" }}", "x".repeat(70_000))})).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    for path in ["/api/executions/nope", "/api/executions/nope/events"] {
        assert_eq!(r.client.get(r.url(path)).send().await.unwrap().status(), StatusCode::NOT_FOUND);
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn executions_match_the_oracle_and_stream_in_order() {
    let r = serve().await;
    for (net, min_rule_sets) in [("heterogeneous", 1), ("base", 0)] {
        let fx = network(&r, net);
        for alignment in [true, false] {
            let id = r
                .start(json!({"queryName": USER_INFORMATION, "network": net, "alignment": alignment, "deterministic": true}))
                .await;
            let events = r.events(&id).await;
            let handle = r.finished(&id).await;
            assert_eq!(handle["status"], "done");
            let report: ExecutionReport = serde_json::from_value(handle["report"].clone()).unwrap();
            assert_eq!(&report.results, fx.oracle(USER_INFORMATION, alignment).unwrap(), "{net} {alignment}");

            assert!(event_order_ok(&events), "{:?}", events.iter().map(ProgressEvent::kind).collect::<Vec<_>>());
            let table = events.iter().find_map(|e| match e {
                ProgressEvent::ResultTable { results } => Some(results.clone()),
                _ => None,
            });
            assert_eq!(table.as_ref(), Some(&report.results));
            let discovered: Vec<&ProgressEvent> = events.iter().filter(|e| e.kind() == "ruleSetDiscovered").collect();
            if alignment {
                assert!(discovered.len() >= min_rule_sets);
            } else {
                assert!(discovered.is_empty());
            }
            if net == "base" {
                assert!(discovered.is_empty());
            }
            for e in discovered {
                let ProgressEvent::RuleSetDiscovered(summary) = e else { unreachable!() };
                assert!(summary.prefixes.iter().all(|p| (0..fx.pod_styles.len()).any(|i| *p == format!("{}u{i}/", fx.base()))));
            }
            assert_eq!(r.events(&id).await, events, "replay differs");
        }
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn cyclic_issuer_rule_surfaces_as_rejection() {
    let r = serve().await;
    let id = r
        .start(json!({
            "queryName": USER_INFORMATION,
            "network": "heterogeneous",
            "deterministic": true,
            "issuerRules": [{"subject": "http://schema.org/name", "relation": "equivalentProperty", "object": "http://xmlns.com/foaf/0.1/name"}]
        }))
        .await;
    let events = r.events(&id).await;
    assert!(event_order_ok(&events));
    assert!(events.iter().any(|e| matches!(e, ProgressEvent::RuleRejected(rej) if rej.reason == ltqp_align::alignment::RejectReason::Cycle)));
    assert_eq!(r.finished(&id).await["status"], "done");
}

#[tokio::test(flavor = "multi_thread")]
async fn concurrent_executions_are_isolated() {
    let r = serve().await;
    let mut ids = Vec::new();
    for name in QUERY_NAMES {
        ids.push((name, r.start(json!({"queryName": name, "network": "heterogeneous"})).await));
    }
    let fx = network(&r, "heterogeneous");
    for (name, id) in ids {
        let report: ExecutionReport = serde_json::from_value(r.finished(&id).await["report"].clone()).unwrap();
        assert_eq!(&report.results, fx.oracle(name, true).unwrap(), "{name}");
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn http_backend_matches_in_memory() {
    let r = serve().await;
    for net in ["base", "heterogeneous"] {
        let fx = network(&r, net);
        let outcome = tokio::task::spawn_blocking(move || {
            let http = HttpSource::new(DEFAULT_HTTP_TIMEOUT).unwrap();
            for name in QUERY_NAMES {
                let query = fx.parsed_query(name).unwrap();
                let cfg = fx.traversal_config(name).unwrap().deterministic(true);
                let a = execute(&query, cfg.clone(), &fx.source()).unwrap();
                let b = execute(&query, cfg, &http).unwrap();
                assert_eq!(a.results, b.results, "{name}");
                let iris = |rep: &ExecutionReport| rep.documents_fetched.iter().map(|d| d.iri.clone()).collect::<BTreeSet<_>>();
                assert_eq!(iris(&a), iris(&b), "{name}");
                assert!(b.fetch_errors.is_empty());
            }
        });
        outcome.await.unwrap();
    }
}
