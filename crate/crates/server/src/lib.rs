//! Hosts fixture networks as pods and runs traversal executions over them.

mod executions;

use std::collections::BTreeMap;
use std::convert::Infallible;
use std::io;
use std::net::SocketAddr;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::thread;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream};
use ltqp_align::alignment::{issuer_rules_from_specs, IssuerRuleSpec};
use ltqp_align::fixture::{FixtureSet, NetworkConfiguration};
use ltqp_align::source::{with_cache, HttpSource, DEFAULT_HTTP_TIMEOUT};
use ltqp_align::sparql::{parse_query, QueryParseError};
use ltqp_align::traversal::{execute_with_observer, Policy, ProgressEvent, TraversalConfig};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::oneshot;

pub use executions::{Execution, ExecutionHandle, ExecutionStatus, Executions};

pub const BODY_LIMIT: usize = 64 * 1024;
pub const DEFAULT_NETWORK: &str = "heterogeneous";

/// One hosted network: a fixture rebased under `{origin}/pods/{name}/`.
pub struct Network {
    pub name: String,
    pub fixture: FixtureSet,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NetworkDescriptor {
    pub name: String,
    pub base: String,
    pub configuration: NetworkConfiguration,
    pub pod_count: usize,
    pub document_count: usize,
    pub rule_set_count: usize,
    pub random_seed: u64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryDescriptor {
    pub name: String,
    pub network: String,
    pub text: String,
    pub seeds: Vec<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExecutionRequest {
    pub query_text: Option<String>,
    pub query_name: Option<String>,
    #[serde(default = "enabled")]
    pub alignment: bool,
    #[serde(default)]
    pub policy: Policy,
    #[serde(default)]
    pub deterministic: bool,
    #[serde(default)]
    pub issuer_rules: Vec<IssuerRuleSpec>,
    pub network: Option<String>,
    pub seeds: Option<Vec<String>>,
}

fn enabled() -> bool {
    true
}

pub struct AppState {
    origin: String,
    networks: BTreeMap<String, Network>,
    executions: Executions,
}

impl AppState {
    /// Rebase each fixture under `{origin}/pods/{configuration}/`.
    pub fn new(origin: &str, fixtures: Vec<FixtureSet>) -> Self {
        let origin = origin.trim_end_matches('/').to_owned();
        let networks = fixtures
            .into_iter()
            .map(|fx| {
                let name = fx.config.configuration.name().to_owned();
                let fixture = fx.rebase(&format!("{origin}/pods/{name}/"));
                (name.clone(), Network { name, fixture })
            })
            .collect();
        Self {
            origin,
            networks,
            executions: Executions::default(),
        }
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn network(&self, name: &str) -> Option<&FixtureSet> {
        self.networks.get(name).map(|n| &n.fixture)
    }

    pub fn execution(&self, id: &str) -> Option<Arc<Execution>> {
        self.executions.get(id)
    }

    pub fn descriptors(&self) -> Vec<NetworkDescriptor> {
        self.networks
            .values()
            .map(|n| NetworkDescriptor {
                name: n.name.clone(),
                base: n.fixture.base().to_owned(),
                configuration: n.fixture.config.configuration,
                pod_count: n.fixture.config.pod_count,
                document_count: n.fixture.documents.len(),
                rule_set_count: n.fixture.rule_set_documents.len(),
                random_seed: n.fixture.config.random_seed,
            })
            .collect()
    }

    pub fn queries(&self) -> Vec<QueryDescriptor> {
        self.networks
            .values()
            .flat_map(|n| {
                n.fixture.queries.iter().map(|q| QueryDescriptor {
                    name: q.name.clone(),
                    network: n.name.clone(),
                    text: q.text.clone(),
                    seeds: q.seeds.clone(),
                })
            })
            .collect()
    }

    /// Validate a request, register the execution and run it on a blocking
    /// thread.
    pub fn start(self: &Arc<Self>, request: ExecutionRequest) -> Result<Arc<Execution>, ApiError> {
        let name = request.network.as_deref().unwrap_or(DEFAULT_NETWORK);
        let fixture = self
            .network(name)
            .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, format!("network '{name}' is not hosted")))?;
        let (query, default_seeds) = match (&request.query_text, &request.query_name) {
            (Some(text), None) => (parse_query(text).map_err(ApiError::from)?, vec![format!("{}u0/card", fixture.base())]),
            (None, Some(qn)) => {
                let named = fixture
                    .query(qn)
                    .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
                (parse_query(&named.text).map_err(ApiError::from)?, named.seeds.clone())
            }
            _ => return Err(ApiError::new(StatusCode::BAD_REQUEST, "exactly one of queryText and queryName is required")),
        };
        let issuer_rules = issuer_rules_from_specs(&request.issuer_rules)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
        let cfg = TraversalConfig::new(request.seeds.clone().unwrap_or(default_seeds))
            .skip_namespaces(fixture.skip_namespaces.clone())
            .alignment(request.alignment)
            .policy(request.policy)
            .deterministic(request.deterministic)
            .issuer_rules(issuer_rules);
        cfg.validate().map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;

        let execution = self.executions.create();
        let exec = Arc::clone(&execution);
        tokio::task::spawn_blocking(move || {
            let observer = |e: &ProgressEvent| exec.push(e.clone());
            let run = || {
                let http = HttpSource::new(DEFAULT_HTTP_TIMEOUT).map_err(|e| e.to_string())?;
                execute_with_observer(&query, cfg, &with_cache(http), &observer).map_err(|e| e.to_string())
            };
            let message = match catch_unwind(AssertUnwindSafe(run)) {
                Ok(Ok(_)) => return,
                Ok(Err(message)) => message,
                Err(_) => "execution aborted".to_owned(),
            };
            log::warn!("execution {} failed: {message}", exec.id);
            exec.push(ProgressEvent::Error { message });
        });
        Ok(execution)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: serde_json::Value,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            body: json!({ "error": message.into() }),
        }
    }
}

impl From<QueryParseError> for ApiError {
    fn from(e: QueryParseError) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": e.to_string(), "position": e.position(), "parseError": e }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type Shared = State<Arc<AppState>>;

async fn serve_document(State(state): Shared, Path((network, path)): Path<(String, String)>) -> Response {
    let Some(fixture) = state.network(&network) else {
        return StatusCode::NOT_FOUND.into_response();
    };
    match fixture.documents.get(&format!("{}{path}", fixture.base())) {
        Some(text) => ([(header::CONTENT_TYPE, "text/turtle")], text.clone()).into_response(),
        None => StatusCode::NOT_FOUND.into_response(),
    }
}

async fn create_execution(State(state): Shared, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let request: ExecutionRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid request body: {e}")))?;
    let execution = state.start(request)?;
    Ok((StatusCode::ACCEPTED, Json(json!({ "id": execution.id }))))
}

fn unknown(id: &str) -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, format!("unknown execution '{id}'"))
}

async fn execution_status(State(state): Shared, Path(id): Path<String>) -> Result<Json<ExecutionHandle>, ApiError> {
    state.execution(&id).map(|e| Json(e.handle())).ok_or_else(|| unknown(&id))
}

/// Replay the buffered events, then follow live ones until a terminal event.
pub fn event_stream(execution: Arc<Execution>) -> impl Stream<Item = ProgressEvent> {
    let rx = execution.subscribe();
    stream::unfold((execution, rx, 0usize, false), |(execution, mut rx, cursor, finished)| async move {
        if finished {
            return None;
        }
        loop {
            if let Some(event) = execution.event(cursor) {
                let terminal = event.is_terminal();
                return Some((event, (execution, rx, cursor + 1, terminal)));
            }
            if rx.changed().await.is_err() && execution.event(cursor).is_none() {
                return None;
            }
        }
    })
}

async fn execution_events(
    State(state): Shared,
    Path(id): Path<String>,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let execution = state.execution(&id).ok_or_else(|| unknown(&id))?;
    let events = futures::StreamExt::map(event_stream(execution), |e| {
        Ok(Event::default()
            .event(e.kind())
            .json_data(&e)
            .expect("events serialize"))
    });
    Ok(Sse::new(events).keep_alive(KeepAlive::default()))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/pods/{network}/{*path}", get(serve_document))
        .route("/api/executions", post(create_execution))
        .route("/api/executions/{id}", get(execution_status))
        .route("/api/executions/{id}/events", get(execution_events))
        .route("/api/queries", get(|State(s): Shared| async move { Json(s.queries()) }))
        .route("/api/networks", get(|State(s): Shared| async move { Json(s.descriptors()) }))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

/// The origin clients should use to reach a listener bound at `addr`.
pub fn origin_for(addr: SocketAddr) -> String {
    let ip = if addr.ip().is_unspecified() {
        "127.0.0.1".to_owned()
    } else {
        match addr.ip() {
            std::net::IpAddr::V6(v6) => format!("[{v6}]"),
            v4 => v4.to_string(),
        }
    };
    format!("http://{ip}:{}", addr.port())
}

/// A bound listener plus the state it serves.
pub struct Server {
    listener: TcpListener,
    state: Arc<AppState>,
}

impl Server {
    /// Bind `addr` and host `fixtures` under the resulting origin, or under
    /// `public_origin` when the service sits behind a proxy.
    pub async fn bind(addr: SocketAddr, fixtures: Vec<FixtureSet>, public_origin: Option<&str>) -> io::Result<Self> {
        let listener = TcpListener::bind(addr).await?;
        let origin = match public_origin {
            Some(o) => o.to_owned(),
            None => origin_for(listener.local_addr()?),
        };
        let state = Arc::new(AppState::new(&origin, fixtures));
        Ok(Self { listener, state })
    }

    pub fn state(&self) -> Arc<AppState> {
        Arc::clone(&self.state)
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub async fn run(self) -> io::Result<()> {
        axum::serve(self.listener, router(self.state)).await
    }

    pub async fn run_until(self, shutdown: impl std::future::Future<Output = ()> + Send + 'static) -> io::Result<()> {
        axum::serve(self.listener, router(self.state)).with_graceful_shutdown(shutdown).await
    }
}

/// A server on its own runtime thread, stopped on drop. Lets synchronous
/// callers host a network.
pub struct BackgroundServer {
    state: Arc<AppState>,
    stop: Option<oneshot::Sender<()>>,
    thread: Option<thread::JoinHandle<io::Result<()>>>,
}

impl BackgroundServer {
    pub fn start(addr: SocketAddr, fixtures: Vec<FixtureSet>) -> io::Result<Self> {
        let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
        let server = runtime.block_on(Server::bind(addr, fixtures, None))?;
        let state = server.state();
        let (stop, stopped) = oneshot::channel::<()>();
        let thread = thread::spawn(move || {
            runtime.block_on(server.run_until(async {
                let _ = stopped.await;
            }))
        });
        Ok(Self {
            state,
            stop: Some(stop),
            thread: Some(thread),
        })
    }

    pub fn state(&self) -> &Arc<AppState> {
        &self.state
    }

    pub fn origin(&self) -> &str {
        self.state.origin()
    }
}

impl Drop for BackgroundServer {
    fn drop(&mut self) {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}
