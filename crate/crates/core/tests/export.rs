//! Interchange round trips and DOT output checked against a small DOT
//! grammar.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semgraph_core::dot::{to_dot, CONSTRAINT_COLOR, HIGHLIGHT_COLOR};
use semgraph_core::graph::{FeatureStructure, SemGraph};
use semgraph_core::interchange::{read_graph, read_graphs, write_graph, write_graphs};
use semgraph_core::matcher::match_graph;
use semgraph_core::penman::parse_penman_corpus;
use semgraph_core::query::parse_request;
use semgraph_core::sbn::parse_sbn;

const FOX: &str = include_str!("fixtures/fox.penman");
const PRIME: &str = include_str!("fixtures/prime.sbn");
const QUANTML: &str = include_str!("fixtures/quantml-a10.json");

// ---------------------------------------------------------------------------
// DOT checker: graph ::= 'digraph' ID? '{' stmt* '}'
//              stmt  ::= (('node'|'edge'|'graph') attrs | ID ('->' ID)* attrs?) ';'?

#[derive(Debug, Default)]
struct DotSummary {
    nodes: Vec<(String, Vec<(String, String)>)>,
    edges: Vec<(String, String, Vec<(String, String)>)>,
}

#[derive(Debug, PartialEq)]
enum Tok {
    Id(String),
    Arrow,
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '-' && cs.get(i + 1) == Some(&'>') {
            out.push(Tok::Arrow);
            i += 2;
        } else if "{}[];,=".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else if c == '"' {
            let mut v = String::new();
            i += 1;
            loop {
                match cs.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        v.push(*cs.get(i + 1).ok_or("dangling escape")?);
                        i += 2;
                    }
                    Some(&ch) => {
                        v.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(v));
        } else if c.is_alphanumeric() || c == '_' || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '.') {
                i += 1;
            }
            let word: String = cs[start..i].iter().collect();
            let numeral = word.chars().all(|c| c.is_ascii_digit() || c == '.');
            let ident = !word.starts_with(|c: char| c.is_ascii_digit()) && !word.contains('.');
            if !numeral && !ident {
                return Err(format!("bad identifier {word}"));
            }
            out.push(Tok::Id(word));
        } else {
            return Err(format!("unexpected {c:?}"));
        }
    }
    Ok(out)
}

fn parse_dot(s: &str) -> Result<DotSummary, String> {
    let toks = lex(s)?;
    let mut p = 0;
    let id = |p: &mut usize| match toks.get(*p) {
        Some(Tok::Id(v)) => {
            *p += 1;
            Ok(v.clone())
        }
        t => Err(format!("expected id, got {t:?}")),
    };
    let sym = |p: &mut usize, c: char| {
        if toks.get(*p) == Some(&Tok::Sym(c)) {
            *p += 1;
            true
        } else {
            false
        }
    };
    if id(&mut p)? != "digraph" {
        return Err("not a digraph".into());
    }
    if matches!(toks.get(p), Some(Tok::Id(_))) {
        p += 1;
    }
    if !sym(&mut p, '{') {
        return Err("missing {".into());
    }
    let attrs = |p: &mut usize| -> Result<Vec<(String, String)>, String> {
        let mut out = Vec::new();
        if !sym(p, '[') {
            return Ok(out);
        }
        while !sym(p, ']') {
            let k = id(p)?;
            if !sym(p, '=') {
                return Err(format!("attribute {k} without value"));
            }
            out.push((k, id(p)?));
            let _ = sym(p, ',') || sym(p, ';');
        }
        Ok(out)
    };
    let mut summary = DotSummary::default();
    loop {
        if sym(&mut p, '}') {
            break;
        }
        let head = id(&mut p)?;
        if matches!(head.as_str(), "node" | "edge" | "graph") {
            attrs(&mut p)?;
        } else if toks.get(p) == Some(&Tok::Arrow) {
            let mut chain = vec![head];
            while toks.get(p) == Some(&Tok::Arrow) {
                p += 1;
                chain.push(id(&mut p)?);
            }
            let a = attrs(&mut p)?;
            for w in chain.windows(2) {
                summary.edges.push((w[0].clone(), w[1].clone(), a.clone()));
            }
        } else {
            let a = attrs(&mut p)?;
            summary.nodes.push((head, a));
        }
        let _ = sym(&mut p, ';');
    }
    if p != toks.len() {
        return Err("trailing input".into());
    }
    Ok(summary)
}

fn attr<'a>(attrs: &'a [(String, String)], k: &str) -> Option<&'a str> {
    attrs.iter().find(|(a, _)| a == k).map(|(_, v)| v.as_str())
}

fn fox() -> SemGraph {
    let (c, report) = parse_penman_corpus("fox", FOX);
    assert!(report.is_clean());
    c.graphs()[0].clone()
}

#[test]
fn fox_dot_has_seven_nodes_and_eight_edges() {
    let dot = to_dot(&fox(), None);
    let s = parse_dot(&dot).unwrap();
    assert_eq!(s.nodes.len(), 7);
    assert_eq!(s.edges.len(), 8);
    let declared: BTreeSet<_> = s.nodes.iter().map(|(n, _)| n.clone()).collect();
    assert!(s.edges.iter().all(|(a, b, _)| declared.contains(a) && declared.contains(b)));
    let mut labels: Vec<_> = s.edges.iter().map(|(_, _, a)| attr(a, "label").unwrap()).collect();
    labels.sort();
    assert_eq!(labels, ["ARG0", "ARG1", "ARG1", "ARG2", "ord", "poss", "time", "value"]);
    assert_eq!(dot, to_dot(&fox(), None));
}

#[test]
fn membership_edges_are_dotted() {
    let g = parse_sbn(PRIME).unwrap().sealed();
    let s = parse_dot(&to_dot(&g, None)).unwrap();
    let dotted: Vec<_> = s.edges.iter().filter(|(_, _, a)| attr(a, "style") == Some("dotted")).collect();
    assert_eq!(dotted.len(), 3);
    assert!(dotted.iter().all(|(_, _, a)| attr(a, "label") == Some("in")));
    let boxes = s.nodes.iter().filter(|(_, a)| attr(a, "shape") == Some("box")).count();
    assert_eq!(boxes, 2);
}

#[test]
fn single_node_match_highlights_one_node() {
    let (c, _) = parse_penman_corpus("s", "(s / say-01 :ARG0 (b / boy) :ARG1 (h / hello))");
    let g = &c.graphs()[0];
    let req = parse_request("pattern { N [concept=\"say-01\"] }").unwrap();
    let bindings = match_graph(&req, g);
    assert_eq!(bindings.len(), 1);
    let s = parse_dot(&to_dot(g, Some(&bindings[0]))).unwrap();
    let lit: Vec<_> = s.nodes.iter().filter(|(_, a)| attr(a, "color") == Some(HIGHLIGHT_COLOR)).collect();
    assert_eq!(lit.len(), 1);
    assert!(attr(&lit[0].1, "label").unwrap().starts_with("say-01"));
    assert!(s.edges.iter().all(|(_, _, a)| attr(a, "color").is_none()));
}

#[test]
fn highlighted_edges_and_constraints() {
    let g = read_graph(QUANTML).unwrap();
    let s = parse_dot(&to_dot(&g, None)).unwrap();
    let red: Vec<_> = s.edges.iter().filter(|(_, _, a)| attr(a, "color") == Some(CONSTRAINT_COLOR)).collect();
    assert_eq!(red.len(), 1);
    assert!(attr(&red[0].2, "label").unwrap().starts_with("equal"));
    let req = parse_request("pattern { e: E -[agent]-> X }").unwrap();
    let b = &match_graph(&req, &g)[0];
    let s = parse_dot(&to_dot(&g, Some(b))).unwrap();
    assert_eq!(s.edges.iter().filter(|(_, _, a)| attr(a, "color") == Some(HIGHLIGHT_COLOR)).count(), 1);
    assert_eq!(s.nodes.iter().filter(|(_, a)| attr(a, "color") == Some(HIGHLIGHT_COLOR)).count(), 2);
}

#[test]
fn dot_escapes_quotes() {
    let mut g = SemGraph::new();
    g.add_node(FeatureStructure::new().with("value", "say \"hi\"\\")).unwrap();
    let s = parse_dot(&to_dot(&g.sealed(), None)).unwrap();
    assert_eq!(attr(&s.nodes[0].1, "label"), Some("say \"hi\"\\"));
}

// ---------------------------------------------------------------------------
// interchange

#[test]
fn quantml_fixture_is_canonical() {
    let g = read_graph(QUANTML).unwrap();
    assert_eq!(g.node_count(), 3);
    let equal: Vec<_> = g.edges().filter(|(_, e)| e.label_str() == "equal").collect();
    assert_eq!(equal.len(), 1);
    assert_eq!(equal[0].1.label.get("kind"), Some("constraint"));
    let once = write_graph(&g);
    assert_eq!(once, QUANTML);
    assert_eq!(write_graph(&read_graph(&once).unwrap()), once);
}

#[test]
fn reference_graphs_round_trip() {
    for g in [fox(), parse_sbn(PRIME).unwrap().sealed()] {
        let once = write_graph(&g);
        let back = read_graph(&once).unwrap();
        assert_isomorphic(&g, &back);
        assert_eq!(write_graph(&back), once);
    }
}

const FEATURES: [&str; 4] = ["concept", "value", "polarity", "box"];
const VALUES: [&str; 5] = ["a", "b", "-", "x y", "é\"q\""];

fn random_graph(rng: &mut ChaCha8Rng) -> SemGraph {
    let mut g = SemGraph::new();
    let n = rng.gen_range(0..=12);
    for i in 0..n {
        let mut fs = FeatureStructure::new();
        for _ in 0..rng.gen_range(0..3) {
            fs.insert(*FEATURES.choose(rng).unwrap(), *VALUES.choose(rng).unwrap());
        }
        let name = rng.gen_bool(0.5).then(|| format!("v{}", i % 4));
        g.add_named_node(name, fs).unwrap();
    }
    let ids: Vec<_> = g.node_ids().collect();
    if !ids.is_empty() {
        for _ in 0..rng.gen_range(0..20) {
            let mut fs = FeatureStructure::label(*["ARG0", "in", "op1", "equal"].choose(rng).unwrap());
            if rng.gen_bool(0.3) {
                fs.insert("kind", "constraint");
            }
            let _ = g.add_edge(*ids.choose(rng).unwrap(), *ids.choose(rng).unwrap(), fs);
        }
    }
    if rng.gen_bool(0.5) {
        g.meta.insert("sent_id", format!("s{}", rng.gen::<u16>()));
    }
    g.sealed()
}

/// The reader keeps declaration order, so identity on ids must be an
/// isomorphism that preserves every feature structure.
fn assert_isomorphic(a: &SemGraph, b: &SemGraph) {
    assert_eq!(a.node_count(), b.node_count());
    assert_eq!(a.edge_count(), b.edge_count());
    assert_eq!(a.meta, b.meta);
    for id in a.node_ids() {
        assert_eq!(a.features(id), b.features(id));
    }
    let edges = |g: &SemGraph| -> BTreeSet<_> {
        g.edges().map(|(_, e)| (e.source, e.target, e.label.clone())).collect()
    };
    assert_eq!(edges(a), edges(b));
}

#[test]
fn thousand_random_graphs_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let graphs: Vec<SemGraph> = (0..1000).map(|_| random_graph(&mut rng)).collect();
    for g in &graphs {
        let text = write_graph(g);
        let back = read_graph(&text).unwrap();
        assert_isomorphic(g, &back);
        assert_eq!(write_graph(&back), text);
        parse_dot(&to_dot(g, None)).unwrap();
    }
    let many = read_graphs(&write_graphs(&graphs)).unwrap();
    assert_eq!(many.len(), graphs.len());
    for (a, b) in graphs.iter().zip(&many) {
        assert_isomorphic(a, b);
    }
}

proptest! {
    #[test]
    fn arbitrary_values_survive(values in proptest::collection::vec("\\PC{0,8}", 1..6)) {
        let mut g = SemGraph::new();
        let mut prev = None;
        for v in &values {
            let n = g.add_node(FeatureStructure::new().with("value", v.as_str())).unwrap();
            if let Some(p) = prev {
                g.add_edge(p, n, FeatureStructure::label(v.as_str())).unwrap();
            }
            prev = Some(n);
        }
        let g = g.sealed();
        let back = read_graph(&write_graph(&g)).unwrap();
        assert_isomorphic(&g, &back);
        prop_assert!(parse_dot(&to_dot(&g, None)).is_ok());
    }
}
