//! The labeled-graph model shared by every reader and by the matcher.
//!
//! A [`SemGraph`] holds nodes decorated with flat [`FeatureStructure`]s and
//! directed edges whose label is itself a feature structure carrying at least
//! the `label` feature. Graphs are built incrementally and then sealed; once
//! sealed they are immutable and can be shared freely between threads.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Name of the edge feature every edge must carry.
pub const LABEL: &str = "label";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph is sealed; no further construction allowed")]
    Sealed,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("edge endpoint {0} does not exist")]
    UnknownEndpoint(NodeId),
    #[error("duplicate edge {src} -[{label}]-> {tgt}")]
    DuplicateEdge {
        src: NodeId,
        tgt: NodeId,
        label: FeatureStructure,
    },
    #[error("edge label has no `label` feature")]
    MissingLabelFeature,
    #[error("duplicate sentence id `{0}` in corpus")]
    DuplicateSentId(String),
}

/// Flat map from feature name to string value. Ordered, so printing and
/// comparison are deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureStructure(BTreeMap<String, String>);

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Shorthand for a simple edge label `{label: value}`.
    pub fn label(value: impl Into<String>) -> Self {
        let mut fs = Self::new();
        fs.insert(LABEL, value);
        fs
    }

    pub fn with(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.insert(name, value);
        self
    }

    /// Inserts or replaces a feature. Empty names are ignored.
    pub fn insert(&mut self, name: impl Into<String>, value: impl Into<String>) -> Option<String> {
        let name = name.into();
        if name.is_empty() {
            return None;
        }
        self.0.insert(name, value.into())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<String> {
        self.0.remove(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// A simple edge label has only the `label` feature.
    pub fn is_simple_label(&self) -> bool {
        self.0.len() == 1 && self.contains(LABEL)
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_simple_label() {
            return f.write_str(self.get(LABEL).unwrap_or_default());
        }
        f.write_str("[")?;
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v:?}")?;
        }
        f.write_str("]")
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for FeatureStructure {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        let mut fs = Self::new();
        for (k, v) in iter {
            fs.insert(k, v);
        }
        fs
    }
}

impl From<BTreeMap<String, String>> for FeatureStructure {
    fn from(map: BTreeMap<String, String>) -> Self {
        map.into_iter().collect()
    }
}

impl From<FeatureStructure> for BTreeMap<String, String> {
    fn from(fs: FeatureStructure) -> Self {
        fs.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    /// Source-format name (Penman variable, SBN box or line name, interchange id).
    pub name: Option<String>,
    pub features: FeatureStructure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub label: FeatureStructure,
}

impl Edge {
    /// The value of the `label` feature.
    pub fn label_str(&self) -> &str {
        self.label.get(LABEL).unwrap_or_default()
    }
}

/// One sentence's annotation graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SemGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    pub meta: FeatureStructure,
    // unique display keys, filled at seal time
    keys: Vec<String>,
    sealed: bool,
}

impl SemGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_meta(meta: FeatureStructure) -> Self {
        Self {
            meta,
            ..Self::default()
        }
    }

    pub fn add_node(&mut self, features: FeatureStructure) -> Result<NodeId, GraphError> {
        self.add_named_node(None::<String>, features)
    }

    pub fn add_named_node(
        &mut self,
        name: Option<impl Into<String>>,
        features: FeatureStructure,
    ) -> Result<NodeId, GraphError> {
        if self.sealed {
            return Err(GraphError::Sealed);
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            name: name.map(Into::into),
            features,
        });
        self.out_edges.push(Vec::new());
        self.in_edges.push(Vec::new());
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        src: NodeId,
        tgt: NodeId,
        label: FeatureStructure,
    ) -> Result<EdgeId, GraphError> {
        if self.sealed {
            return Err(GraphError::Sealed);
        }
        for end in [src, tgt] {
            if end.index() >= self.nodes.len() {
                return Err(GraphError::UnknownEndpoint(end));
            }
        }
        if !label.contains(LABEL) {
            return Err(GraphError::MissingLabelFeature);
        }
        let duplicate = self.out_edges[src.index()].iter().any(|e| {
            let edge = &self.edges[e.index()];
            edge.target == tgt && edge.label == label
        });
        if duplicate {
            return Err(GraphError::DuplicateEdge { src, tgt, label });
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge {
            source: src,
            target: tgt,
            label,
        });
        self.out_edges[src.index()].push(id);
        self.in_edges[tgt.index()].push(id);
        Ok(id)
    }

    /// Freezes the graph. Idempotent.
    pub fn seal(&mut self) {
        if self.sealed {
            return;
        }
        self.keys = unique_keys(&self.nodes);
        self.sealed = true;
    }

    /// Consuming variant of [`SemGraph::seal`].
    pub fn sealed(mut self) -> Self {
        self.seal();
        self
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.index())
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id.index())
    }

    pub fn features(&self, id: NodeId) -> &FeatureStructure {
        &self.nodes[id.index()].features
    }

    pub fn node_ids(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (NodeId(i as u32), n))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| (EdgeId(i as u32), e))
    }

    /// Outgoing edge ids of `n`, in insertion (= id) order.
    pub fn out_edge_ids(&self, n: NodeId) -> &[EdgeId] {
        &self.out_edges[n.index()]
    }

    pub fn in_edge_ids(&self, n: NodeId) -> &[EdgeId] {
        &self.in_edges[n.index()]
    }

    pub fn successors(&self, n: NodeId) -> Result<Vec<(EdgeId, NodeId)>, GraphError> {
        let out = self.out_edges.get(n.index()).ok_or(GraphError::UnknownNode(n))?;
        Ok(out
            .iter()
            .map(|&e| (e, self.edges[e.index()].target))
            .collect())
    }

    pub fn predecessors(&self, n: NodeId) -> Result<Vec<(EdgeId, NodeId)>, GraphError> {
        let inc = self.in_edges.get(n.index()).ok_or(GraphError::UnknownNode(n))?;
        Ok(inc
            .iter()
            .map(|&e| (e, self.edges[e.index()].source))
            .collect())
    }

    /// Unique, human-readable key of a node: its source name when that name is
    /// unique in the graph, otherwise a generated `_N` key.
    pub fn node_key(&self, n: NodeId) -> String {
        match self.keys.get(n.index()) {
            Some(k) => k.clone(),
            None => unique_keys(&self.nodes)[n.index()].clone(),
        }
    }

    pub fn sent_id(&self) -> Option<&str> {
        self.meta.get("sent_id")
    }

    pub fn text(&self) -> Option<&str> {
        self.meta.get("text")
    }

    /// True iff the directed graph (every edge counted, membership edges
    /// included) has a directed cycle. Self-loops are cycles.
    pub fn is_cyclic(&self) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }
        let mut mark = vec![Mark::White; self.nodes.len()];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for root in 0..self.nodes.len() {
            if mark[root] != Mark::White {
                continue;
            }
            mark[root] = Mark::Grey;
            stack.push((root, 0));
            while let Some(&mut (n, ref mut next)) = stack.last_mut() {
                if let Some(&e) = self.out_edges[n].get(*next) {
                    *next += 1;
                    let t = self.edges[e.index()].target.index();
                    match mark[t] {
                        Mark::Grey => return true,
                        Mark::White => {
                            mark[t] = Mark::Grey;
                            stack.push((t, 0));
                        }
                        Mark::Black => {}
                    }
                } else {
                    mark[n] = Mark::Black;
                    stack.pop();
                }
            }
        }
        false
    }
}

fn unique_keys(nodes: &[Node]) -> Vec<String> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for n in nodes {
        if let Some(name) = n.name.as_deref() {
            *counts.entry(name).or_default() += 1;
        }
    }
    let mut taken: HashSet<String> = counts
        .iter()
        .filter(|(_, &c)| c == 1)
        .map(|(k, _)| (*k).to_owned())
        .collect();
    nodes
        .iter()
        .enumerate()
        .map(|(i, n)| match n.name.as_deref() {
            Some(name) if counts[name] == 1 => name.to_owned(),
            _ => {
                let mut key = format!("_{i}");
                while taken.contains(&key) {
                    key.push('\'');
                }
                taken.insert(key.clone());
                key
            }
        })
        .collect()
}

/// Ordered collection of sealed graphs with unique sentence ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub id: String,
    graphs: Vec<SemGraph>,
    by_sent_id: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            ..Self::default()
        }
    }

    /// Appends a graph, sealing it. Graphs without a `sent_id` get their
    /// 1-based position as id.
    pub fn push(&mut self, mut graph: SemGraph) -> Result<usize, GraphError> {
        let sent_id = match graph.sent_id() {
            Some(s) => s.to_owned(),
            None => {
                let s = (self.graphs.len() + 1).to_string();
                graph.meta.insert("sent_id", s.clone());
                s
            }
        };
        if self.by_sent_id.contains_key(&sent_id) {
            return Err(GraphError::DuplicateSentId(sent_id));
        }
        graph.seal();
        let idx = self.graphs.len();
        self.by_sent_id.insert(sent_id, idx);
        self.graphs.push(graph);
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[SemGraph] {
        &self.graphs
    }

    pub fn get(&self, index: usize) -> Option<&SemGraph> {
        self.graphs.get(index)
    }

    pub fn position(&self, sent_id: &str) -> Option<usize> {
        self.by_sent_id.get(sent_id).copied()
    }

    pub fn by_sent_id(&self, sent_id: &str) -> Option<&SemGraph> {
        self.position(sent_id).map(|i| &self.graphs[i])
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SemGraph> {
        self.graphs.iter()
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a SemGraph;
    type IntoIter = std::slice::Iter<'a, SemGraph>;

    fn into_iter(self) -> Self::IntoIter {
        self.graphs.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn concept(c: &str) -> FeatureStructure {
        FeatureStructure::new().with("concept", c)
    }

    /// Small AMR graph built by hand.
    fn fox_graph() -> (SemGraph, BTreeMap<&'static str, NodeId>) {
        let mut g = SemGraph::new();
        let mut ids = BTreeMap::new();
        for (v, c) in [
            ("r", "resemble-01"),
            ("y", "you"),
            ("f", "fox"),
            ("i", "i"),
            ("k", "know-02"),
            ("o", "ordinal-entity"),
        ] {
            ids.insert(v, g.add_named_node(Some(v), concept(c)).unwrap());
        }
        let one = g
            .add_node(FeatureStructure::new().with("value", "1"))
            .unwrap();
        for (s, l, t) in [
            ("r", "ARG1", "y"),
            ("r", "ARG2", "f"),
            ("f", "poss", "i"),
            ("r", "time", "k"),
            ("k", "ARG0", "i"),
            ("k", "ARG1", "f"),
            ("k", "ord", "o"),
        ] {
            g.add_edge(ids[s], ids[t], FeatureStructure::label(l)).unwrap();
        }
        g.add_edge(ids["o"], one, FeatureStructure::label("value"))
            .unwrap();
        (g.sealed(), ids)
    }

    fn dfs_cycle_oracle(n: usize, edges: &[(usize, usize)]) -> bool {
        // a cycle exists iff some node reaches itself through ≥ 1 edge
        (0..n).any(|start| {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = edges
                .iter()
                .filter(|(s, _)| *s == start)
                .map(|(_, t)| *t)
                .collect();
            while let Some(x) = stack.pop() {
                if x == start {
                    return true;
                }
                if !std::mem::replace(&mut seen[x], true) {
                    stack.extend(edges.iter().filter(|(s, _)| *s == x).map(|(_, t)| *t));
                }
            }
            false
        })
    }

    #[test]
    fn add_node_on_empty_graph() {
        let mut g = SemGraph::new();
        let a = g.add_node(concept("fox")).unwrap();
        let b = g.add_node(concept("fox")).unwrap();
        assert_ne!(a, b);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.features(a), &concept("fox"));
    }

    #[test]
    fn seal_blocks_construction_and_is_idempotent() {
        let mut g = SemGraph::new();
        g.seal();
        g.seal();
        assert!(g.is_sealed());
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.add_node(concept("x")), Err(GraphError::Sealed));
    }

    #[test]
    fn add_edge_errors() {
        let mut g = SemGraph::new();
        let r = g.add_named_node(Some("r"), concept("resemble-01")).unwrap();
        let y = g.add_named_node(Some("y"), concept("you")).unwrap();
        g.add_edge(r, y, FeatureStructure::label("ARG1")).unwrap();
        assert!(matches!(
            g.add_edge(r, y, FeatureStructure::label("ARG1")),
            Err(GraphError::DuplicateEdge { .. })
        ));
        assert_eq!(
            g.add_edge(r, y, FeatureStructure::new()),
            Err(GraphError::MissingLabelFeature)
        );
        assert_eq!(
            g.add_edge(r, NodeId(9), FeatureStructure::label("x")),
            Err(GraphError::UnknownEndpoint(NodeId(9)))
        );
        // same endpoints, different label is fine
        g.add_edge(r, y, FeatureStructure::label("ARG2")).unwrap();
        // decorated label differs from the simple one
        g.add_edge(r, y, FeatureStructure::label("ARG1").with("kind", "x"))
            .unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn successors_and_predecessors_on_fox_graph() {
        let (g, ids) = fox_graph();
        let labels: Vec<_> = g
            .successors(ids["r"])
            .unwrap()
            .into_iter()
            .map(|(e, _)| g.edge(e).unwrap().label_str().to_owned())
            .collect();
        assert_eq!(labels, ["ARG1", "ARG2", "time"]);
        let preds: Vec<_> = g
            .predecessors(ids["i"])
            .unwrap()
            .into_iter()
            .map(|(e, n)| (g.edge(e).unwrap().label_str().to_owned(), n))
            .collect();
        assert_eq!(
            preds,
            [("poss".to_owned(), ids["f"]), ("ARG0".to_owned(), ids["k"])]
        );
        assert_eq!(
            g.successors(NodeId(42)),
            Err(GraphError::UnknownNode(NodeId(42)))
        );
        let one = NodeId(6);
        assert!(g.successors(one).unwrap().is_empty());
    }

    #[test]
    fn cyclicity() {
        assert!(!SemGraph::new().sealed().is_cyclic());
        let mut g = SemGraph::new();
        let a = g.add_node(concept("a")).unwrap();
        let b = g.add_node(concept("b")).unwrap();
        g.add_edge(a, b, FeatureStructure::label("x")).unwrap();
        g.add_edge(b, a, FeatureStructure::label("x")).unwrap();
        assert!(g.sealed().is_cyclic());

        let (fox, _) = fox_graph();
        let edges: Vec<_> = fox
            .edges()
            .map(|(_, e)| (e.source.index(), e.target.index()))
            .collect();
        assert!(!dfs_cycle_oracle(fox.node_count(), &edges));
        assert!(!fox.is_cyclic());
    }

    #[test]
    fn node_keys_are_unique() {
        let mut g = SemGraph::new();
        g.add_named_node(Some("_1"), concept("a")).unwrap();
        g.add_node(concept("b")).unwrap();
        g.add_named_node(Some("x"), concept("c")).unwrap();
        g.add_named_node(Some("x"), concept("d")).unwrap();
        let g = g.sealed();
        let keys: Vec<_> = g.node_ids().map(|n| g.node_key(n)).collect();
        assert_eq!(keys, ["_1", "_1'", "_2", "_3"]);
    }

    #[test]
    fn corpus_rejects_duplicate_ids() {
        let mut c = Corpus::new("c");
        let g = SemGraph::with_meta(FeatureStructure::new().with("sent_id", "s1"));
        c.push(g.clone()).unwrap();
        assert_eq!(
            c.push(g),
            Err(GraphError::DuplicateSentId("s1".into()))
        );
        c.push(SemGraph::new()).unwrap();
        assert_eq!(c.get(1).unwrap().sent_id(), Some("2"));
        assert!(c.get(1).unwrap().is_sealed());
    }

    #[test]
    fn sealed_graph_is_shareable() {
        let (g, _) = fox_graph();
        let g = std::sync::Arc::new(g);
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let g = g.clone();
                std::thread::spawn(move || (g.is_cyclic(), g.edge_count()))
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), (false, 8));
        }
    }

    proptest! {
        #[test]
        fn cycle_detection_matches_oracle(
            mask in proptest::collection::vec(any::<bool>(), 36)
        ) {
            let edges: Vec<(usize, usize)> = mask
                .iter()
                .enumerate()
                .filter(|(_, &on)| on)
                .map(|(i, _)| (i / 6, i % 6))
                .collect();
            let mut g = SemGraph::new();
            let ids: Vec<_> = (0..6).map(|_| g.add_node(FeatureStructure::new()).unwrap()).collect();
            for &(s, t) in &edges {
                g.add_edge(ids[s], ids[t], FeatureStructure::label("x")).unwrap();
            }
            let g = g.sealed();
            prop_assert_eq!(g.is_cyclic(), dfs_cycle_oracle(6, &edges));
        }

        #[test]
        fn successors_mirror_predecessors(
            edges in proptest::collection::btree_set((0usize..5, 0usize..5, 0u8..3), 0..15)
        ) {
            let mut g = SemGraph::new();
            let ids: Vec<_> = (0..5).map(|_| g.add_node(FeatureStructure::new()).unwrap()).collect();
            for &(s, t, l) in &edges {
                g.add_edge(ids[s], ids[t], FeatureStructure::label(l.to_string())).unwrap();
            }
            let g = g.sealed();
            for n in g.node_ids() {
                for (e, m) in g.successors(n).unwrap() {
                    prop_assert!(g.predecessors(m).unwrap().contains(&(e, n)));
                }
                for (e, m) in g.predecessors(n).unwrap() {
                    prop_assert!(g.successors(m).unwrap().contains(&(e, n)));
                }
            }
            for (_, e) in g.edges() {
                prop_assert!(g.node(e.source).is_some() && g.node(e.target).is_some());
            }
        }
    }
}
