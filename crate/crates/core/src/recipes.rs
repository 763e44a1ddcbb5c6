//! Shipped requests: the example library and the error-mining packs.

use serde::Serialize;
use thiserror::Error;

use crate::graph::Corpus;
use crate::index::FeatureIndex;
use crate::matcher::Matcher;
use crate::query::{parse_request, Request};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Recipe {
    pub name: &'static str,
    pub description: &'static str,
    pub request: &'static str,
    /// Suggested clustering key.
    pub cluster: Option<&'static str>,
    /// Request whose count is the natural denominator for this one.
    pub baseline: Option<&'static str>,
}

impl Recipe {
    pub fn parsed(&self) -> Request {
        parse_request(self.request).expect("shipped recipes parse")
    }
}

const NAME_EDGES: &str = include_str!("../recipes/amr/name-edges.req");

pub const NAME_WITHOUT_WIKI: Recipe = Recipe {
    name: "name-without-wiki",
    description: "named entity with a name edge but no wiki edge",
    request: include_str!("../recipes/amr/name-without-wiki.req"),
    cluster: None,
    baseline: Some(NAME_EDGES),
};

pub const AGENT_EQUALS_PATIENT: Recipe = Recipe {
    name: "agent-equals-patient",
    description: "one entity is both Agent and Patient of a predicate",
    request: include_str!("../recipes/pmb/agent-equals-patient.req"),
    cluster: None,
    baseline: None,
};

pub const DOUBLE_NEGATION: Recipe = Recipe {
    name: "double-negation",
    description: "two nested negated boxes",
    request: include_str!("../recipes/pmb/double-negation.req"),
    cluster: None,
    baseline: None,
};

pub const SAY: Recipe = Recipe {
    name: "say-01",
    description: "every say-01 concept",
    request: include_str!("../recipes/examples/say.req"),
    cluster: None,
    baseline: None,
};

pub const SAY_WITHOUT_ARG0: Recipe = Recipe {
    name: "say-01-without-arg0",
    description: "say-01 with no sayer, in either edge direction",
    request: include_str!("../recipes/examples/say-without-arg0.req"),
    cluster: None,
    baseline: None,
};

pub const MAKE_CONCEPTS: Recipe = Recipe {
    name: "make-concepts",
    description: "senses of make, clustered by concept",
    request: include_str!("../recipes/examples/make-concepts.req"),
    cluster: Some("N.concept"),
    baseline: None,
};

pub const RELATION_DISTRIBUTION: Recipe = Recipe {
    name: "relation-distribution",
    description: "relations between two concept nodes, clustered by label",
    request: include_str!("../recipes/examples/relation-distribution.req"),
    cluster: Some("e.label"),
    baseline: None,
};

pub const AND_COORDINATION: Recipe = Recipe {
    name: "and-op1",
    description: "and-coordination, split by presence of an op1 edge",
    request: include_str!("../recipes/examples/and-coordination.req"),
    cluster: Some("whether { N -[op1]-> X }"),
    baseline: None,
};

pub const CYCLIC: Recipe = Recipe {
    name: "cyclic",
    description: "graphs containing a directed cycle",
    request: include_str!("../recipes/examples/cyclic.req"),
    cluster: None,
    baseline: None,
};

/// All shipped requests, for the editor's example library.
pub const EXAMPLES: &[Recipe] = &[
    SAY,
    SAY_WITHOUT_ARG0,
    MAKE_CONCEPTS,
    RELATION_DISTRIBUTION,
    AND_COORDINATION,
    CYCLIC,
    NAME_WITHOUT_WIKI,
    AGENT_EQUALS_PATIENT,
    DOUBLE_NEGATION,
];

pub const PACKS: &[(&str, &[Recipe])] = &[
    ("amr", &[NAME_WITHOUT_WIKI]),
    ("pmb", &[AGENT_EQUALS_PATIENT, DOUBLE_NEGATION]),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown pack `{0}` (available: amr, pmb)")]
pub struct UnknownPack(pub String);

pub fn pack(name: &str) -> Result<&'static [Recipe], UnknownPack> {
    PACKS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, r)| *r)
        .ok_or_else(|| UnknownPack(name.to_owned()))
}

pub const SAMPLE_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LintRow {
    pub recipe: String,
    pub count: usize,
    /// Up to [`SAMPLE_SIZE`] sentence ids, in corpus order.
    pub samples: Vec<String>,
    pub baseline: Option<usize>,
}

impl LintRow {
    /// Share of the baseline occurrences flagged by the recipe.
    pub fn ratio(&self) -> Option<f64> {
        self.baseline
            .filter(|&b| b > 0)
            .map(|b| self.count as f64 / b as f64)
    }
}

pub fn lint(
    pack_name: &str,
    corpus: &Corpus,
    index: Option<&FeatureIndex>,
) -> Result<Vec<LintRow>, UnknownPack> {
    Ok(pack(pack_name)?
        .iter()
        .map(|r| {
            let occs = Matcher::new(&r.parsed()).match_corpus(corpus, index);
            let mut samples: Vec<String> = Vec::new();
            for o in &occs {
                if samples.len() == SAMPLE_SIZE {
                    break;
                }
                if samples.last() != Some(&o.graph.sent_id) {
                    samples.push(o.graph.sent_id.clone());
                }
            }
            let baseline = r.baseline.map(|b| {
                let req = parse_request(b).expect("shipped recipes parse");
                Matcher::new(&req).match_corpus(corpus, index).len()
            });
            LintRow {
                recipe: r.name.to_owned(),
                count: occs.len(),
                samples,
                baseline,
            }
        })
        .collect())
}
