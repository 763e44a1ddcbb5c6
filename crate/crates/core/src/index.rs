//! Inverted index from exact `(feature, value)` pairs to the nodes carrying
//! them, across a whole corpus.

use std::collections::HashMap;

use crate::graph::{Corpus, NodeId};

/// A node in a corpus: graph position and node id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Posting {
    pub graph: u32,
    pub node: NodeId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureIndex {
    postings: HashMap<String, HashMap<String, Vec<Posting>>>,
}

impl FeatureIndex {
    /// Builds the index; posting lists are sorted by (graph, node).
    pub fn build(corpus: &Corpus) -> Self {
        let mut postings: HashMap<String, HashMap<String, Vec<Posting>>> = HashMap::new();
        for (gi, g) in corpus.iter().enumerate() {
            for (id, node) in g.nodes() {
                for (k, v) in node.features.iter() {
                    postings
                        .entry(k.to_owned())
                        .or_default()
                        .entry(v.to_owned())
                        .or_default()
                        .push(Posting {
                            graph: gi as u32,
                            node: id,
                        });
                }
            }
        }
        Self { postings }
    }

    /// Nodes carrying `feature = value`, in corpus order.
    pub fn lookup(&self, feature: &str, value: &str) -> &[Posting] {
        self.postings
            .get(feature)
            .and_then(|m| m.get(value))
            .map_or(&[], Vec::as_slice)
    }

    /// Number of distinct `(feature, value)` pairs.
    pub fn len(&self) -> usize {
        self.postings.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.postings.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str, &[Posting])> {
        self.postings.iter().flat_map(|(k, m)| {
            m.iter()
                .map(move |(v, p)| (k.as_str(), v.as_str(), p.as_slice()))
        })
    }
}

/// Splits a sorted posting list into per-graph runs.
pub(crate) fn group_by_graph(postings: &[Posting]) -> Vec<(usize, Vec<NodeId>)> {
    let mut out: Vec<(usize, Vec<NodeId>)> = Vec::new();
    for p in postings {
        match out.last_mut() {
            Some((g, nodes)) if *g == p.graph as usize => nodes.push(p.node),
            _ => out.push((p.graph as usize, vec![p.node])),
        }
    }
    out
}
