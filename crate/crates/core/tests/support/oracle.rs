//! Random small graphs and requests, and a brute-force matcher used as the
//! reference for the engine. Shared with the acceptance suite.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use semgraph_core::graph::{EdgeId, FeatureStructure, NodeId, SemGraph};
use semgraph_core::matcher::{Binding, Matcher};
use semgraph_core::query::{
    parse_request, Comparison, FeatureClause, GlobalConstraint, NodeRef, PatternBlock, Request,
};

const CONCEPTS: [&str; 3] = ["a", "b", "c"];
const LABELS: [&str; 3] = ["p", "q", "r"];

pub fn random_graph(rng: &mut ChaCha8Rng) -> SemGraph {
    let n = rng.gen_range(1..=8);
    let mut g = SemGraph::new();
    let ids: Vec<NodeId> = (0..n)
        .map(|_| {
            let mut fs = FeatureStructure::new();
            if rng.gen_bool(0.85) {
                fs.insert("concept", *CONCEPTS.choose(rng).unwrap());
            }
            if rng.gen_bool(0.4) {
                fs.insert("x", if rng.gen_bool(0.5) { "1" } else { "2" });
            }
            g.add_node(fs).unwrap()
        })
        .collect();
    let m = rng.gen_range(0..=12);
    for _ in 0..m {
        let s = *ids.choose(rng).unwrap();
        let t = *ids.choose(rng).unwrap();
        // duplicate edges are rejected by the model; just skip them
        let _ = g.add_edge(s, t, FeatureStructure::label(*LABELS.choose(rng).unwrap()));
    }
    g.sealed()
}

fn random_clause(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..7) {
        6 => "x <> \"1\"".to_owned(),
        0 => format!("concept = {}", CONCEPTS.choose(rng).unwrap()),
        1 => format!("concept <> {}", CONCEPTS.choose(rng).unwrap()),
        2 => "concept = re\"[ab]\"".to_owned(),
        3 => "x".to_owned(),
        4 => "x = \"1\"".to_owned(),
        _ => "concept".to_owned(),
    }
}

fn random_arrow(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 => "->".to_owned(),
        1 => {
            let a = LABELS.choose(rng).unwrap();
            let b = LABELS.choose(rng).unwrap();
            format!("-[{a}|{b}]->")
        }
        _ => format!("-[{}]->", LABELS.choose(rng).unwrap()),
    }
}

/// Random request text: at most three base nodes (wildcards included), at
/// most three base edges and at most one `without`.
pub fn random_request(rng: &mut ChaCha8Rng) -> String {
    let mut clauses = Vec::new();
    let named = rng.gen_range(1..=3usize);
    let names: Vec<String> = (0..named).map(|i| format!("N{i}")).collect();
    let mut wildcards_left = 3 - named;
    for n in &names {
        let k = rng.gen_range(0..=2);
        let cl: Vec<String> = (0..k).map(|_| random_clause(rng)).collect();
        clauses.push(format!("{n} [{}]", cl.join(", ")));
    }
    let edges = rng.gen_range(0..=3);
    for i in 0..edges {
        let mut end = |rng: &mut ChaCha8Rng| {
            if wildcards_left > 0 && rng.gen_bool(0.2) {
                wildcards_left -= 1;
                "*".to_owned()
            } else {
                names.choose(rng).unwrap().clone()
            }
        };
        let s = end(rng);
        let t = end(rng);
        let name = if rng.gen_bool(0.5) { format!("e{i}: ") } else { String::new() };
        clauses.push(format!("{name}{s} {} {t}", random_arrow(rng)));
    }
    if named >= 2 && rng.gen_bool(0.2) {
        let op = if rng.gen_bool(0.5) { "=" } else { "<>" };
        let f = if rng.gen_bool(0.5) { "concept" } else { "x" };
        clauses.push(format!("N0.{f} {op} N1.{f}"));
    }
    let mut text = format!("pattern {{ {} }}\n", clauses.join("; "));
    if rng.gen_bool(0.6) {
        text.push_str(&random_without(rng, &names));
    }
    if rng.gen_bool(0.1) {
        text.push_str(if rng.gen_bool(0.5) { "global { is_cyclic }\n" } else { "global { is_acyclic }\n" });
    }
    text
}

pub fn random_without(rng: &mut ChaCha8Rng, names: &[String]) -> String {
    let mut clauses = Vec::new();
    let a = names.choose(rng).unwrap().clone();
    match rng.gen_range(0..4) {
        0 => clauses.push(format!("{a} [{}]", random_clause(rng))),
        1 => {
            let b = names.choose(rng).unwrap();
            clauses.push(format!("{a} {} {b}", random_arrow(rng)));
        }
        2 => clauses.push(format!("{a} {} *", random_arrow(rng))),
        _ => {
            clauses.push(format!("W [{}]", random_clause(rng)));
            if rng.gen_bool(0.5) {
                clauses.push(format!("W {} {a}", random_arrow(rng)));
            } else {
                clauses.push(format!("{a} {} W", random_arrow(rng)));
            }
        }
    }
    format!("without {{ {} }}\n", clauses.join("; "))
}

// ---------------------------------------------------------------------------
// brute force

#[derive(Clone)]
struct Elements {
    /// (ident or None for a wildcard, clauses)
    nodes: Vec<(Option<String>, Vec<FeatureClause>)>,
    /// (ident, src, tgt, block edge)
    edges: Vec<(Option<String>, usize, usize, semgraph_core::query::LabelSet)>,
}

fn elements(block: &PatternBlock, prefix: &[(Option<String>, Vec<FeatureClause>)]) -> Elements {
    let mut nodes: Vec<(Option<String>, Vec<FeatureClause>)> =
        prefix.iter().map(|(n, _)| (n.clone(), Vec::new())).collect();
    fn slot(nodes: &mut Vec<(Option<String>, Vec<FeatureClause>)>, id: &str) -> usize {
        if let Some(i) = nodes.iter().position(|(n, _)| n.as_deref() == Some(id)) {
            return i;
        }
        nodes.push((Some(id.to_owned()), Vec::new()));
        nodes.len() - 1
    }
    for nc in &block.nodes {
        let i = slot(&mut nodes, &nc.ident);
        nodes[i].1.extend(nc.clauses.iter().cloned());
    }
    let mut edges = Vec::new();
    for e in &block.edges {
        let end = |r: &NodeRef, nodes: &mut Vec<(Option<String>, Vec<FeatureClause>)>| match r {
            NodeRef::Named(n) => slot(nodes, n),
            NodeRef::Wildcard => {
                nodes.push((None, Vec::new()));
                nodes.len() - 1
            }
        };
        let s = end(&e.src, &mut nodes);
        let t = end(&e.tgt, &mut nodes);
        edges.push((e.ident.clone(), s, t, e.labels.clone()));
    }
    Elements { nodes, edges }
}

fn clause_ok(c: &FeatureClause, fs: &FeatureStructure) -> bool {
    match c {
        FeatureClause::Present(f) => fs.get(f).is_some(),
        FeatureClause::Eq(f, v) => fs.get(f) == Some(v),
        FeatureClause::Neq(f, v) => matches!(fs.get(f), Some(x) if x != v),
        FeatureClause::Regex(f, r) => matches!(fs.get(f), Some(x) if r.is_match(x)),
    }
}

/// Every injective extension of `fixed` (first `fixed.len()` nodes) that
/// avoids `used_nodes` / `used_edges` for the fresh part.
fn assignments(
    g: &SemGraph,
    el: &Elements,
    block: &PatternBlock,
    fixed: &[NodeId],
    used_edges: &BTreeSet<EdgeId>,
) -> Vec<(Vec<NodeId>, Vec<EdgeId>)> {
    let all: Vec<NodeId> = g.node_ids().collect();
    let mut out = Vec::new();
    let mut node_maps: Vec<Vec<NodeId>> = vec![fixed.to_vec()];
    for _ in fixed.len()..el.nodes.len() {
        let mut next = Vec::new();
        for m in &node_maps {
            for &n in &all {
                if !m.contains(&n) {
                    let mut m2 = m.clone();
                    m2.push(n);
                    next.push(m2);
                }
            }
        }
        node_maps = next;
    }
    for nm in node_maps {
        let nodes_ok = el
            .nodes
            .iter()
            .zip(&nm)
            .all(|((_, cl), &id)| cl.iter().all(|c| clause_ok(c, g.features(id))));
        if !nodes_ok {
            continue;
        }
        let idx = |ident: &str| el.nodes.iter().position(|(n, _)| n.as_deref() == Some(ident)).unwrap();
        let rel_ok = block.relations.iter().all(|r| {
            let a = g.features(nm[idx(&r.left.0)]).get(&r.left.1);
            let b = g.features(nm[idx(&r.right.0)]).get(&r.right.1);
            match (a, b, r.op) {
                (Some(a), Some(b), Comparison::Eq) => a == b,
                (Some(a), Some(b), Comparison::Neq) => a != b,
                _ => false,
            }
        });
        if !rel_ok {
            continue;
        }
        let mut edge_maps: Vec<Vec<EdgeId>> = vec![vec![]];
        for (_, s, t, labels) in &el.edges {
            let mut next = Vec::new();
            for m in &edge_maps {
                for (eid, e) in g.edges() {
                    if e.source == nm[*s]
                        && e.target == nm[*t]
                        && labels.accepts(e.label_str())
                        && !m.contains(&eid)
                        && !used_edges.contains(&eid)
                    {
                        let mut m2 = m.clone();
                        m2.push(eid);
                        next.push(m2);
                    }
                }
            }
            edge_maps = next;
        }
        for em in edge_maps {
            out.push((nm.clone(), em));
        }
    }
    out
}

fn reachable_cycle(g: &SemGraph) -> bool {
    let n = g.node_count();
    let mut reach = vec![vec![false; n]; n];
    for (_, e) in g.edges() {
        reach[e.source.index()][e.target.index()] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    (0..n).any(|i| reach[i][i])
}

pub fn oracle_full(req: &Request, g: &SemGraph, whether: Option<&PatternBlock>) -> BTreeMap<Binding, bool> {
    let mut out = BTreeMap::new();
    for c in &req.globals {
        let cyclic = reachable_cycle(g);
        if (*c == GlobalConstraint::IsCyclic) != cyclic {
            return out;
        }
    }
    let base = elements(&req.base, &[]);
    let extends = |block: &PatternBlock, nm: &[NodeId], em: &[EdgeId]| {
        let el = elements(block, &base.nodes);
        let used: BTreeSet<EdgeId> = em.iter().copied().collect();
        !assignments(g, &el, block, nm, &used).is_empty()
    };
    for (nm, em) in assignments(g, &base, &req.base, &[], &BTreeSet::new()) {
        if req.withouts.iter().any(|w| extends(w, &nm, &em)) {
            continue;
        }
        let mut b = Binding::default();
        for ((ident, _), id) in base.nodes.iter().zip(&nm) {
            if let Some(i) = ident {
                b.nodes.insert(i.clone(), *id);
            }
        }
        for ((ident, ..), id) in base.edges.iter().zip(&em) {
            if let Some(i) = ident {
                b.edges.insert(i.clone(), *id);
            }
        }
        let flag = whether.is_some_and(|w| extends(w, &nm, &em));
        *out.entry(b).or_insert(false) |= flag;
    }
    out
}

pub fn oracle(req: &Request, g: &SemGraph) -> Vec<Binding> {
    oracle_full(req, g, None).into_keys().collect()
}

/// Runs `cases` seeded (graph, request) instances through engine and
/// oracle; returns the first disagreement and the number of non-empty results.
pub fn check_cases(rng: &mut ChaCha8Rng, cases: usize) -> Result<usize, String> {
    let mut nonempty = 0;
    for case in 0..cases {
        let g = random_graph(rng);
        let text = random_request(rng);
        let req = parse_request(&text).map_err(|e| format!("case {case}: {e}\n{text}"))?;
        let got = Matcher::new(&req).match_graph(&g);
        let want = oracle(&req, &g);
        if got != want {
            return Err(format!(
                "case {case}\n{text}\nengine {got:?}\noracle {want:?}\n{}",
                semgraph_core::interchange::write_graph(&g)
            ));
        }
        if !got.is_empty() {
            nonempty += 1;
        }
    }
    Ok(nonempty)
}
