//! HTTP search service over a corpus registry.
//!
//! | method | path | |
//! |---|---|---|
//! | GET | `/corpora` | corpus list |
//! | POST | `/corpora/{id}/search` | run a request, paginated |
//! | GET | `/corpora/{id}/graphs/{sent_id}?format=interchange\|dot` | one graph |
//! | GET | `/recipes` | shipped example requests |

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::CorsLayer;

use semgraph_core::corpus::{LoadedCorpus, Registry};
use semgraph_core::dot::to_dot;
use semgraph_core::interchange::write_graph;
use semgraph_core::matcher::{Budget, ClusterTable, Matcher, Occurrence};
use semgraph_core::query::{parse_cluster_key, parse_request, QueryError};
use semgraph_core::recipes::EXAMPLES;
use semgraph_core::SemGraph;

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(10);
pub const DEFAULT_LIMIT: i64 = 20;
pub const MAX_LIMIT: i64 = 1000;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub budget: Duration,
    pub cors: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            cors: true,
        }
    }
}

/// Registry handle; `replace` swaps in a freshly loaded registry while
/// in-flight requests keep the one they started with.
#[derive(Debug, Clone, Default)]
pub struct SharedRegistry(Arc<RwLock<Arc<Registry>>>);

impl SharedRegistry {
    pub fn new(registry: Registry) -> Self {
        Self(Arc::new(RwLock::new(Arc::new(registry))))
    }

    pub fn current(&self) -> Arc<Registry> {
        self.0.read().expect("registry lock").clone()
    }

    pub fn replace(&self, registry: Registry) {
        *self.0.write().expect("registry lock") = Arc::new(registry);
    }
}

#[derive(Clone)]
struct AppState {
    registry: SharedRegistry,
    config: ServiceConfig,
}

pub fn router(registry: SharedRegistry, config: ServiceConfig) -> Router {
    let cors = config.cors;
    let app = Router::new()
        .route("/corpora", get(list_corpora))
        .route("/corpora/{id}/search", post(search))
        .route("/corpora/{id}/graphs/{*sent_id}", get(graph))
        .route("/recipes", get(recipes))
        .with_state(AppState { registry, config });
    if cors {
        app.layer(CorsLayer::permissive())
    } else {
        app
    }
}

#[derive(Debug)]
pub enum ApiError {
    UnknownCorpus(String),
    UnknownGraph(String),
    BadRequest(String),
    Query(QueryError),
    Budget,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::UnknownCorpus(id) => (
                StatusCode::NOT_FOUND,
                json!({"error": format!("unknown corpus `{id}`")}),
            ),
            ApiError::UnknownGraph(id) => (
                StatusCode::NOT_FOUND,
                json!({"error": format!("unknown sentence `{id}`")}),
            ),
            ApiError::BadRequest(msg) => (StatusCode::BAD_REQUEST, json!({"error": msg})),
            ApiError::Query(e) => {
                let (line, col) = e.position().unzip();
                (
                    StatusCode::UNPROCESSABLE_ENTITY,
                    json!({"error": e.to_string(), "line": line, "col": col}),
                )
            }
            ApiError::Budget => (
                StatusCode::SERVICE_UNAVAILABLE,
                json!({"error": "match budget exceeded", "partial": false}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

#[derive(Serialize)]
struct CorpusInfo {
    id: String,
    format: &'static str,
    language: Option<String>,
    graphs: usize,
}

async fn list_corpora(State(st): State<AppState>) -> Json<Vec<CorpusInfo>> {
    let reg = st.registry.current();
    Json(
        reg.iter()
            .map(|c| CorpusInfo {
                id: c.id().to_owned(),
                format: c.entry.format.as_str(),
                language: c.entry.language.clone(),
                graphs: c.corpus.len(),
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBody {
    pub request: String,
    #[serde(default)]
    pub cluster: Option<String>,
    /// Restrict items to one cluster row.
    #[serde(default)]
    pub cluster_value: Option<String>,
    #[serde(default)]
    pub limit: Option<i64>,
    #[serde(default)]
    pub offset: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub value: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemBindings {
    /// Pattern node name to node id as written in the interchange document.
    pub nodes: BTreeMap<String, String>,
    /// Pattern edge name to position in the document's edge list.
    pub edges: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub sent_id: String,
    pub text: Option<String>,
    pub bindings: ItemBindings,
    pub dot: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clusters: Option<Vec<ClusterRow>>,
    pub items: Vec<Item>,
}

fn item(g: &SemGraph, occ: &Occurrence) -> Item {
    Item {
        sent_id: occ.graph.sent_id.clone(),
        text: g.text().map(str::to_owned),
        bindings: ItemBindings {
            nodes: occ
                .binding
                .nodes
                .iter()
                .map(|(k, &n)| (k.clone(), g.node_key(n)))
                .collect(),
            edges: occ.binding.edges.iter().map(|(k, e)| (k.clone(), e.0)).collect(),
        },
        dot: to_dot(g, Some(&occ.binding)),
    }
}

/// Runs a search synchronously; the handler moves this onto a blocking
/// thread.
pub fn run_search(
    corpus: &LoadedCorpus,
    body: &SearchBody,
    budget: Duration,
) -> Result<SearchResponse, ApiError> {
    let limit = body.limit.unwrap_or(DEFAULT_LIMIT);
    let offset = body.offset.unwrap_or(0);
    if !(0..=MAX_LIMIT).contains(&limit) {
        return Err(ApiError::BadRequest(format!("limit must be within 0..={MAX_LIMIT}")));
    }
    if offset < 0 {
        return Err(ApiError::BadRequest("offset must be non-negative".into()));
    }
    let req = parse_request(&body.request).map_err(ApiError::Query)?;
    let key = body
        .cluster
        .as_deref()
        .map(|k| parse_cluster_key(k, &req))
        .transpose()
        .map_err(ApiError::Query)?;
    let matcher = Matcher::new(&req);
    let budget = Budget::with_timeout(budget);
    let (occurrences, clusters) = match &key {
        Some(key) => {
            let found = matcher
                .try_match_clustered(&corpus.corpus, Some(&corpus.index), key, &budget)
                .map_err(|_| ApiError::Budget)?;
            let table = ClusterTable::from_values(key, found.iter().map(|(_, v)| v.as_str()));
            let rows = table
                .sorted()
                .into_iter()
                .map(|(value, count)| ClusterRow {
                    value: value.to_owned(),
                    count,
                })
                .collect();
            let occs = found
                .into_iter()
                .filter(|(_, v)| body.cluster_value.as_ref().is_none_or(|want| want == v))
                .map(|(o, _)| o)
                .collect::<Vec<_>>();
            (occs, Some(rows))
        }
        None => (
            matcher
                .try_match_corpus(&corpus.corpus, Some(&corpus.index), &budget)
                .map_err(|_| ApiError::Budget)?,
            None,
        ),
    };
    let items = occurrences
        .iter()
        .skip(offset as usize)
        .take(limit as usize)
        .map(|o| item(&corpus.corpus.graphs()[o.graph.index], o))
        .collect();
    Ok(SearchResponse {
        total: occurrences.len(),
        clusters,
        items,
    })
}

async fn search(
    State(st): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SearchResponse>, ApiError> {
    let reg = st.registry.current();
    reg.get(&id).map_err(|_| ApiError::UnknownCorpus(id.clone()))?;
    let body: SearchBody = serde_json::from_slice(&body)
        .map_err(|e| ApiError::BadRequest(format!("invalid body: {e}")))?;
    let budget = st.config.budget;
    tokio::task::spawn_blocking(move || {
        let corpus = reg.get(&id).expect("checked above");
        run_search(corpus, &body, budget)
    })
    .await
    .map_err(|e| ApiError::BadRequest(format!("search failed: {e}")))?
    .map(Json)
}

#[derive(Deserialize)]
struct GraphQuery {
    format: Option<String>,
}

async fn graph(
    State(st): State<AppState>,
    Path((id, sent_id)): Path<(String, String)>,
    Query(q): Query<GraphQuery>,
) -> Result<Response, ApiError> {
    let reg = st.registry.current();
    let corpus = reg.get(&id).map_err(|_| ApiError::UnknownCorpus(id.clone()))?;
    let g = corpus
        .corpus
        .by_sent_id(&sent_id)
        .ok_or(ApiError::UnknownGraph(sent_id.clone()))?;
    match q.format.as_deref().unwrap_or("interchange") {
        "interchange" => Ok(([(header::CONTENT_TYPE, "application/json")], write_graph(g)).into_response()),
        "dot" => Ok(([(header::CONTENT_TYPE, "text/vnd.graphviz")], to_dot(g, None)).into_response()),
        other => Err(ApiError::BadRequest(format!(
            "unknown format `{other}` (use interchange or dot)"
        ))),
    }
}

#[derive(Serialize)]
struct RecipeInfo {
    name: &'static str,
    description: &'static str,
    request: &'static str,
    cluster: Option<&'static str>,
}

async fn recipes() -> Json<Vec<RecipeInfo>> {
    Json(
        EXAMPLES
            .iter()
            .map(|r| RecipeInfo {
                name: r.name,
                description: r.description,
                request: r.request,
                cluster: r.cluster,
            })
            .collect(),
    )
}
