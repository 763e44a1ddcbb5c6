//! Labeled semantic graphs (AMR, PMB/DRS), their readers and writers, and a
//! pattern query engine with negative patterns and clustering.

pub mod corpus;
pub mod dot;
pub mod graph;
pub mod index;
pub mod interchange;
pub mod matcher;
pub mod penman;
pub mod query;
pub mod recipes;
pub mod sbn;

pub use corpus::{CorpusConfig, CorpusEntry, CorpusStats, ConfigError, Format, LoadedCorpus, Registry};
pub use graph::{Corpus, Edge, EdgeId, FeatureStructure, GraphError, Node, NodeId, SemGraph};
pub use index::FeatureIndex;
pub use matcher::{
    Binding, Budget, BudgetExceeded, ClusterTable, CorpusRatio, GraphRef, Matcher, Occurrence,
};
pub use query::{parse_cluster_key, parse_request, ClusterKey, QueryError, Request};

/// Outcome of loading a corpus: what was kept, what was skipped and why.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub loaded: usize,
    /// `(sentence id or position, reason)` for every rejected sentence.
    pub skipped: Vec<(String, String)>,
    pub warnings: Vec<String>,
    /// Failure that prevented reading the corpus at all.
    pub error: Option<String>,
}

impl LoadReport {
    pub fn skip(&mut self, label: impl Into<String>, reason: impl Into<String>) {
        self.skipped.push((label.into(), reason.into()));
    }

    pub fn is_clean(&self) -> bool {
        self.skipped.is_empty() && self.error.is_none()
    }
}
