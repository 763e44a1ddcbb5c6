//! JSON interchange format for graphs.
//!
//! ```json
//! {
//!   "meta": { "sent_id": "A10" },
//!   "nodes": [ { "id": "l", "features": { "concept": "lift" } } ],
//!   "edges": [ { "source": "l", "target": "c", "features": { "label": "agent" } } ]
//! }
//! ```
//!
//! A file may hold one such document or an array of them.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Corpus, GraphError, SemGraph, LABEL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("schema error at {path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl SchemaError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
    #[serde(default)]
    pub nodes: Vec<NodeDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    #[serde(default)]
    pub features: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub source: String,
    pub target: String,
    pub features: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<serde_json::Value>),
    One(serde_json::Value),
}

pub fn to_doc(g: &SemGraph) -> GraphDoc {
    let key = |n| g.node_key(n);
    GraphDoc {
        meta: g.meta.clone().into(),
        nodes: g
            .nodes()
            .map(|(id, n)| NodeDoc {
                id: key(id),
                features: n.features.clone().into(),
            })
            .collect(),
        edges: g
            .edges()
            .map(|(_, e)| EdgeDoc {
                source: key(e.source),
                target: key(e.target),
                features: e.label.clone().into(),
            })
            .collect(),
    }
}

pub fn from_doc(doc: GraphDoc, path: &str) -> Result<SemGraph, SchemaError> {
    let mut g = SemGraph::with_meta(doc.meta.into());
    let mut ids = HashMap::new();
    for (i, n) in doc.nodes.into_iter().enumerate() {
        let p = format!("{path}nodes[{i}]");
        if n.id.is_empty() {
            return Err(SchemaError::new(format!("{p}.id"), "empty node id"));
        }
        if n.features.keys().any(String::is_empty) {
            return Err(SchemaError::new(format!("{p}.features"), "empty feature name"));
        }
        let id = g
            .add_named_node(Some(n.id.as_str()), n.features.into())
            .map_err(|e| SchemaError::new(&p, e.to_string()))?;
        if ids.insert(n.id.clone(), id).is_some() {
            return Err(SchemaError::new(
                format!("{p}.id"),
                format!("duplicate node id `{}`", n.id),
            ));
        }
    }
    for (i, e) in doc.edges.into_iter().enumerate() {
        let p = format!("{path}edges[{i}]");
        let resolve = |field: &str, id: &str| {
            ids.get(id)
                .copied()
                .ok_or_else(|| SchemaError::new(format!("{p}.{field}"), format!("unknown node id `{id}`")))
        };
        let src = resolve("source", &e.source)?;
        let tgt = resolve("target", &e.target)?;
        g.add_edge(src, tgt, e.features.into()).map_err(|err| match err {
            GraphError::MissingLabelFeature => SchemaError::new(
                format!("{p}.features"),
                format!("edge features must contain `{LABEL}`"),
            ),
            other => SchemaError::new(&p, other.to_string()),
        })?;
    }
    Ok(g.sealed())
}

fn json_error(e: serde_path_to_error::Error<serde_json::Error>, prefix: &str) -> SchemaError {
    let inner = e.path().to_string();
    let path = match (prefix, inner.as_str()) {
        ("", ".") => "$".to_owned(),
        ("", p) => p.to_owned(),
        (pre, ".") => pre.trim_end_matches('.').to_owned(),
        (pre, p) => format!("{pre}{p}"),
    };
    SchemaError::new(path, e.into_inner().to_string())
}

fn decode(value: serde_json::Value, prefix: &str) -> Result<SemGraph, SchemaError> {
    let doc: GraphDoc =
        serde_path_to_error::deserialize(value).map_err(|e| json_error(e, prefix))?;
    from_doc(doc, prefix)
}

pub fn write_graph(g: &SemGraph) -> String {
    let mut s = serde_json::to_string_pretty(&to_doc(g)).expect("graph documents serialize");
    s.push('\n');
    s
}

pub fn read_graph(text: &str) -> Result<SemGraph, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: GraphDoc = serde_path_to_error::deserialize(de).map_err(|e| json_error(e, ""))?;
    from_doc(doc, "")
}

/// Writes several graphs as one JSON array.
pub fn write_graphs<'a>(graphs: impl IntoIterator<Item = &'a SemGraph>) -> String {
    let docs: Vec<GraphDoc> = graphs.into_iter().map(to_doc).collect();
    let mut s = serde_json::to_string_pretty(&docs).expect("graph documents serialize");
    s.push('\n');
    s
}

/// Reads either a single document or an array of documents.
pub fn read_graphs(text: &str) -> Result<Vec<SemGraph>, SchemaError> {
    let parsed: OneOrMany =
        serde_json::from_str(text).map_err(|e| SchemaError::new("$", e.to_string()))?;
    match parsed {
        OneOrMany::One(v) => Ok(vec![decode(v, "")?]),
        OneOrMany::Many(vs) => vs
            .into_iter()
            .enumerate()
            .map(|(i, v)| decode(v, &format!("[{i}].")))
            .collect(),
    }
}

/// Builds a corpus from interchange text. Graphs must carry distinct
/// `sent_id`s (missing ids are filled with the 1-based position).
pub fn read_corpus(id: &str, text: &str) -> Result<Corpus, SchemaError> {
    let mut corpus = Corpus::new(id);
    for (i, g) in read_graphs(text)?.into_iter().enumerate() {
        corpus
            .push(g)
            .map_err(|e| SchemaError::new(format!("[{i}].meta.sent_id"), e.to_string()))?;
    }
    Ok(corpus)
}
