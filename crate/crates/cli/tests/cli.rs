use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::path::Path;
use std::process::{Command, Output, Stdio};

use ltqp_align::fixture::{generate, FixtureConfig, FixtureSet, QUERY_NAMES, USER_INFORMATION};
use ltqp_align::sparql::ResultTable;
use ltqp_align::traversal::ExecutionReport;
use ltqp_align_server::BackgroundServer;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ltqp-align"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn generate_into(dir: &Path, config: &str) {
    let out = run(&["generate", "--pods", "8", "--config", config, "--seed", "7", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in walk(dir) {
        out.push((entry.strip_prefix(dir).unwrap().display().to_string(), fs::read(&entry).unwrap()));
    }
    out.sort();
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    fs::read_dir(dir)
        .unwrap()
        .flat_map(|e| {
            let p = e.unwrap().path();
            if p.is_dir() { walk(&p) } else { vec![p] }
        })
        .collect()
}

#[test]
fn generate_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    generate_into(&a, "heterogeneous");
    generate_into(&b, "heterogeneous");
    let (ta, tb) = (read_tree(&a), read_tree(&b));
    assert_eq!(ta.len(), 34);
    assert_eq!(ta, tb);
    let fx = FixtureSet::load(&a).unwrap();
    assert_eq!(fx, generate(&FixtureConfig::heterogeneous(7)).unwrap());
}

#[test]
fn query_json_matches_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    generate_into(tmp.path(), "heterogeneous");
    let fx = FixtureSet::load(tmp.path()).unwrap();
    let dir = tmp.path().to_str().unwrap();
    for (switch, alignment) in [("off", false), ("on", true)] {
        let out = run(&["query", "--fixture", dir, "--query-name", USER_INFORMATION, "--alignment", switch, "--deterministic", "--format", "json"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let json: Value = serde_json::from_slice(&out.stdout).unwrap();
        let table = ResultTable::from_sparql_json(&json).unwrap();
        assert_eq!(&table, fx.oracle(USER_INFORMATION, alignment).unwrap());
    }
}

#[test]
fn usage_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let q = tmp.path().join("q.rq");
    fs::write(&q, "SELECT * WHERE { ?s ?p ?o }").unwrap();
    let q = q.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["query", "--query-file", q],
        vec!["query", "--seed", "http://a.ex/x"],
        vec!["query", "--seed", "http://a.ex/x", "--query-file", q, "--query-name", USER_INFORMATION],
        vec!["query", "--seed", "http://a.ex/x", "--query-name", USER_INFORMATION],
        vec!["query", "--seed", "http://a.ex/x", "--query-file", q, "--alignment", "maybe"],
        vec!["query", "--seed", "http://a.ex/x", "--query-file", q, "--workers", "0"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn bad_query_text_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    generate_into(tmp.path(), "base");
    let q = tmp.path().join("bad.rq");
    fs::write(&q, "SELECT ?x WHERE { ?x ").unwrap();
    let out = run(&["query", "--fixture", tmp.path().to_str().unwrap(), "--query-file", q.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    generate_into(&tmp.path().join("fx"), "heterogeneous");
    let dir = tmp.path().join("fx");
    for name in QUERY_NAMES {
        let mut outputs = Vec::new();
        for i in 0..2 {
            let report = tmp.path().join(format!("r{i}.json"));
            let out = run(&[
                "query", "--fixture", dir.to_str().unwrap(), "--query-name", name, "--deterministic", "--format", "table",
                "--report", report.to_str().unwrap(),
            ]);
            assert_eq!(code(&out), 0);
            let report: ExecutionReport = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
            outputs.push((out.stdout, serde_json::to_string(&report.without_timings()).unwrap()));
        }
        assert_eq!(outputs[0], outputs[1], "{name}");
    }
}

#[test]
fn alignment_off_discovers_no_rule_sets() {
    let tmp = tempfile::tempdir().unwrap();
    generate_into(&tmp.path().join("fx"), "heterogeneous");
    let report = tmp.path().join("r.json");
    let out = run(&[
        "query", "--fixture", tmp.path().join("fx").to_str().unwrap(), "--query-name", USER_INFORMATION,
        "--alignment", "off", "--report", report.to_str().unwrap(), "--format", "csv",
    ]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["ruleSetsDiscovered"], Value::Array(vec![]));
    assert_eq!(report["alignmentEnabled"], false);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("friend,name\r\n"));
}

#[test]
fn timeout_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    generate_into(tmp.path(), "heterogeneous");
    let out = run(&["query", "--fixture", tmp.path().to_str().unwrap(), "--query-name", USER_INFORMATION, "--timeout-ms", "0"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn unreachable_seed_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let q = tmp.path().join("q.rq");
    fs::write(&q, "SELECT * WHERE { ?s ?p ?o }").unwrap();
    let out = run(&["query", "--seed", "http://127.0.0.1:9/nothing", "--query-file", q.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let out = run(&["query", "--fixture", tmp.path().join("missing").to_str().unwrap(), "--query-file", q.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn issuer_rules_file_reports_cycles() {
    let tmp = tempfile::tempdir().unwrap();
    generate_into(&tmp.path().join("fx"), "heterogeneous");
    let rules = tmp.path().join("rules.json");
    fs::write(
        &rules,
        r#"[{"subject": "http://schema.org/name", "relation": "equivalentProperty", "object": "http://xmlns.com/foaf/0.1/name"}]"#,
    )
    .unwrap();
    let report = tmp.path().join("r.json");
    let out = run(&[
        "query", "--fixture", tmp.path().join("fx").to_str().unwrap(), "--query-name", USER_INFORMATION, "--deterministic",
        "--issuer-rules", rules.to_str().unwrap(), "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(report["rulesRejected"].as_array().unwrap().iter().any(|r| r["reason"] == "cycle"));
}

#[test]
fn live_seeds_over_http() {
    let server = BackgroundServer::start(
        SocketAddr::from(([127, 0, 0, 1], 0)),
        vec![generate(&FixtureConfig::heterogeneous(7)).unwrap()],
    )
    .unwrap();
    let fx = server.state().network("heterogeneous").unwrap().clone();
    let named = fx.query(USER_INFORMATION).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let q = tmp.path().join("q.rq");
    fs::write(&q, &named.text).unwrap();
    let mut args = vec!["query", "--query-file", q.to_str().unwrap(), "--format", "json", "--deterministic"];
    for s in &named.seeds {
        args.extend(["--seed", s.as_str()]);
    }
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = ResultTable::from_sparql_json(&serde_json::from_slice(&out.stdout).unwrap()).unwrap();
    assert_eq!(&table, fx.oracle(USER_INFORMATION, true).unwrap());
}

#[test]
fn serve_hosts_both_networks() {
    let mut child = bin()
        .args(["serve", "--bind", "127.0.0.1:0", "--pods", "4"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(child.stderr.take().unwrap()).lines();
    let first = lines.next().unwrap().unwrap();
    let origin = first.strip_prefix("serving on ").unwrap().to_owned();
    let networks = http_get_json(&format!("{origin}/api/networks"));
    child.kill().unwrap();
    child.wait().unwrap();
    let names: Vec<&str> = networks.as_array().unwrap().iter().map(|n| n["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["base", "heterogeneous"]);
    assert_eq!(networks[0]["podCount"], 4);
}

/// Minimal HTTP/1.1 GET returning the JSON body.
fn http_get_json(url: &str) -> Value {
    let rest = url.strip_prefix("http://").unwrap();
    let (host, path) = rest.split_at(rest.find('/').unwrap());
    let mut stream = TcpStream::connect(host).unwrap();
    write!(stream, "GET {path} HTTP/1.1\r\nHost: {host}\r\nConnection: close\r\n\r\n").unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    let (head, body) = response.split_once("\r\n\r\n").unwrap();
    assert!(head.starts_with("HTTP/1.1 200"), "{head}");
    serde_json::from_str(body).unwrap()
}
