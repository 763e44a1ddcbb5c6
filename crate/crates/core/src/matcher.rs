//! Pattern matching of requests against graphs and corpora.
//!
//! Semantics: an occurrence is an injective map from pattern nodes to graph
//! nodes and from pattern edges to graph edges that satisfies every node,
//! edge and relation constraint of the base pattern. Anonymous elements
//! (wildcard endpoints and unnamed edges) must exist but are projected away,
//! so occurrences differing only in them are merged. A full assignment is
//! rejected when some `without` block can be extended from it, the fresh
//! nodes and edges of the extension being distinct from each other and from
//! the image of the base pattern.

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Corpus, EdgeId, FeatureStructure, NodeId, SemGraph, LABEL};
use crate::index::{group_by_graph, FeatureIndex};
use crate::query::{
    ClusterKey, Comparison, FeatureClause, GlobalConstraint, LabelSet, NodeRef, PatternBlock,
    Request,
};

/// Cluster row for occurrences whose node lacks the clustering feature.
pub const UNDEFINED: &str = "__undefined__";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("match budget exceeded")]
pub struct BudgetExceeded;

/// Wall-clock limit shared by all workers of one search.
#[derive(Debug, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    exceeded: AtomicBool,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_timeout(limit: Duration) -> Self {
        Self {
            deadline: Some(Instant::now() + limit),
            exceeded: AtomicBool::new(false),
        }
    }

    fn check(&self) -> bool {
        if self.exceeded.load(Ordering::Relaxed) {
            return false;
        }
        match self.deadline {
            Some(d) if Instant::now() >= d => {
                self.exceeded.store(true, Ordering::Relaxed);
                false
            }
            _ => true,
        }
    }
}

/// Named part of one match.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Binding {
    pub nodes: BTreeMap<String, NodeId>,
    pub edges: BTreeMap<String, EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphRef {
    pub corpus: String,
    pub sent_id: String,
    /// Position of the graph in its corpus.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    pub graph: GraphRef,
    pub binding: Binding,
}

// ---------------------------------------------------------------------------
// compilation

#[derive(Debug, Clone)]
struct PNode {
    ident: Option<String>,
    clauses: Vec<FeatureClause>,
}

#[derive(Debug, Clone)]
struct PEdge {
    ident: Option<String>,
    src: usize,
    tgt: usize,
    labels: LabelSet,
}

#[derive(Debug, Clone)]
struct PRelation {
    left: (usize, String),
    op: Comparison,
    right: (usize, String),
}

/// A block whose node index space starts with `shared` nodes bound by an
/// enclosing pattern.
#[derive(Debug, Clone)]
struct Block {
    nodes: Vec<PNode>,
    edges: Vec<PEdge>,
    relations: Vec<PRelation>,
    shared: usize,
}

impl Block {
    fn compile(block: &PatternBlock, outer: Option<&Block>) -> Self {
        let mut nodes: Vec<PNode> = outer.map_or_else(Vec::new, |o| {
            o.nodes
                .iter()
                .map(|n| PNode {
                    ident: n.ident.clone(),
                    clauses: Vec::new(),
                })
                .collect()
        });
        let shared = nodes.len();
        let index_of = |nodes: &mut Vec<PNode>, ident: &str| -> usize {
            match nodes.iter().position(|n| n.ident.as_deref() == Some(ident)) {
                Some(i) => i,
                None => {
                    nodes.push(PNode {
                        ident: Some(ident.to_owned()),
                        clauses: Vec::new(),
                    });
                    nodes.len() - 1
                }
            }
        };
        for ident in block.node_idents() {
            index_of(&mut nodes, ident);
        }
        for nc in &block.nodes {
            let i = index_of(&mut nodes, &nc.ident);
            nodes[i].clauses.extend(nc.clauses.iter().cloned());
        }
        let mut edges = Vec::new();
        for ec in &block.edges {
            let mut end = |r: &NodeRef| match r {
                NodeRef::Named(n) => index_of(&mut nodes, n),
                NodeRef::Wildcard => {
                    nodes.push(PNode {
                        ident: None,
                        clauses: Vec::new(),
                    });
                    nodes.len() - 1
                }
            };
            let src = end(&ec.src);
            let tgt = end(&ec.tgt);
            edges.push(PEdge {
                ident: ec.ident.clone(),
                src,
                tgt,
                labels: ec.labels.clone(),
            });
        }
        let relations = block
            .relations
            .iter()
            .map(|r| PRelation {
                left: (index_of(&mut nodes, &r.left.0), r.left.1.clone()),
                op: r.op,
                right: (index_of(&mut nodes, &r.right.0), r.right.1.clone()),
            })
            .collect();
        Self {
            nodes,
            edges,
            relations,
            shared,
        }
    }

    /// Static selectivity used to order node scans; lower is better.
    fn cost(&self, n: usize) -> u32 {
        self.nodes[n]
            .clauses
            .iter()
            .map(|c| match c {
                FeatureClause::Eq(..) => 0,
                FeatureClause::Regex(..) => 1,
                FeatureClause::Neq(..) | FeatureClause::Present(..) => 2,
            })
            .min()
            .unwrap_or(3)
    }
}

#[derive(Debug, Clone)]
enum StepKind {
    /// Bind a node by scanning candidates.
    Scan(usize),
    /// Check a node bound by the enclosing pattern.
    Check(usize),
    /// Bind an edge whose endpoints are both bound.
    EdgeBetween(usize),
    /// Bind an edge from its bound source, binding the target.
    EdgeForward(usize),
    /// Bind an edge from its bound target, binding the source.
    EdgeBackward(usize),
}

#[derive(Debug, Clone)]
struct Step {
    kind: StepKind,
    /// Relations whose nodes are all bound after this step.
    relations: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Plan {
    steps: Vec<Step>,
    /// Relations over shared nodes only, checked before any step.
    initial_relations: Vec<usize>,
}

impl Plan {
    fn new(block: &Block, start: Option<usize>) -> Self {
        let n = block.nodes.len();
        let mut bound = vec![false; n];
        let mut steps = Vec::new();
        for (i, b) in bound.iter_mut().enumerate().take(block.shared) {
            *b = true;
            if !block.nodes[i].clauses.is_empty() {
                steps.push(StepKind::Check(i));
            }
        }
        let mut edge_done = vec![false; block.edges.len()];
        if let Some(s) = start {
            if !bound[s] {
                bound[s] = true;
                steps.push(StepKind::Scan(s));
            }
        }
        loop {
            // edges with both ends bound first, then edges leaving the bound set
            let between = (0..block.edges.len()).find(|&e| {
                !edge_done[e] && bound[block.edges[e].src] && bound[block.edges[e].tgt]
            });
            if let Some(e) = between {
                edge_done[e] = true;
                steps.push(StepKind::EdgeBetween(e));
                continue;
            }
            let frontier = (0..block.edges.len())
                .filter(|&e| !edge_done[e] && (bound[block.edges[e].src] || bound[block.edges[e].tgt]))
                .min_by_key(|&e| {
                    let pe = &block.edges[e];
                    let other = if bound[pe.src] { pe.tgt } else { pe.src };
                    (block.cost(other), matches!(pe.labels, LabelSet::Any))
                });
            if let Some(e) = frontier {
                edge_done[e] = true;
                let pe = &block.edges[e];
                if bound[pe.src] {
                    bound[pe.tgt] = true;
                    steps.push(StepKind::EdgeForward(e));
                } else {
                    bound[pe.src] = true;
                    steps.push(StepKind::EdgeBackward(e));
                }
                continue;
            }
            match (0..n).filter(|&i| !bound[i]).min_by_key(|&i| block.cost(i)) {
                Some(i) => {
                    bound[i] = true;
                    steps.push(StepKind::Scan(i));
                }
                None => break,
            }
        }

        // attach each relation to the first point where both sides are bound
        let mut bound_after: Vec<bool> = (0..n).map(|i| i < block.shared).collect();
        let mut initial_relations = Vec::new();
        let mut placed = vec![false; block.relations.len()];
        let ready = |bound: &[bool], r: &PRelation| bound[r.left.0] && bound[r.right.0];
        for (ri, r) in block.relations.iter().enumerate() {
            if ready(&bound_after, r) {
                initial_relations.push(ri);
                placed[ri] = true;
            }
        }
        let steps = steps
            .into_iter()
            .map(|kind| {
                match &kind {
                    StepKind::Scan(i) | StepKind::Check(i) => bound_after[*i] = true,
                    StepKind::EdgeBetween(_) => {}
                    StepKind::EdgeForward(e) => bound_after[block.edges[*e].tgt] = true,
                    StepKind::EdgeBackward(e) => bound_after[block.edges[*e].src] = true,
                }
                let mut relations = Vec::new();
                for (ri, r) in block.relations.iter().enumerate() {
                    if !placed[ri] && ready(&bound_after, r) {
                        placed[ri] = true;
                        relations.push(ri);
                    }
                }
                Step { kind, relations }
            })
            .collect();
        Self {
            steps,
            initial_relations,
        }
    }
}

// ---------------------------------------------------------------------------
// search

fn clause_holds(clause: &FeatureClause, fs: &FeatureStructure) -> bool {
    match clause {
        FeatureClause::Present(f) => fs.contains(f),
        FeatureClause::Eq(f, v) => fs.get(f) == Some(v.as_str()),
        FeatureClause::Neq(f, v) => fs.get(f).is_some_and(|x| x != v),
        FeatureClause::Regex(f, re) => fs.get(f).is_some_and(|x| re.is_match(x)),
    }
}

fn node_holds(pn: &PNode, fs: &FeatureStructure) -> bool {
    pn.clauses.iter().all(|c| clause_holds(c, fs))
}

enum Stop {
    Found,
    Aborted,
}

struct State<'g> {
    g: &'g SemGraph,
    nodes: Vec<Option<NodeId>>,
    edges: Vec<Option<EdgeId>>,
    used_nodes: Vec<bool>,
    used_edges: Vec<bool>,
    budget: &'g Budget,
    ticks: u32,
}

impl State<'_> {
    fn tick(&mut self) -> bool {
        self.ticks = self.ticks.wrapping_add(1);
        self.ticks % 1024 != 0 || self.budget.check()
    }

    fn relation_holds(&self, r: &PRelation) -> bool {
        let get = |(n, f): &(usize, String)| {
            let id = self.nodes[*n].expect("relation nodes are bound");
            self.g.features(id).get(f)
        };
        match (get(&r.left), get(&r.right)) {
            (Some(a), Some(b)) => match r.op {
                Comparison::Eq => a == b,
                Comparison::Neq => a != b,
            },
            _ => false,
        }
    }
}

struct Search<'a> {
    block: &'a Block,
    plan: &'a Plan,
    /// Candidate images for one pattern node, from the index.
    seeds: Option<(usize, &'a [NodeId])>,
}

impl Search<'_> {
    fn run(
        &self,
        st: &mut State<'_>,
        on_match: &mut dyn FnMut(&State<'_>) -> ControlFlow<Stop>,
    ) -> ControlFlow<Stop> {
        for &r in &self.plan.initial_relations {
            if !st.relation_holds(&self.block.relations[r]) {
                return ControlFlow::Continue(());
            }
        }
        self.step(0, st, on_match)
    }

    fn bind_node(&self, st: &mut State<'_>, pn: usize, id: NodeId) -> bool {
        if st.used_nodes[id.index()] || !node_holds(&self.block.nodes[pn], st.g.features(id)) {
            return false;
        }
        st.used_nodes[id.index()] = true;
        st.nodes[pn] = Some(id);
        true
    }

    fn unbind_node(&self, st: &mut State<'_>, pn: usize) {
        if let Some(id) = st.nodes[pn].take() {
            st.used_nodes[id.index()] = false;
        }
    }

    fn step(
        &self,
        i: usize,
        st: &mut State<'_>,
        on_match: &mut dyn FnMut(&State<'_>) -> ControlFlow<Stop>,
    ) -> ControlFlow<Stop> {
        let Some(step) = self.plan.steps.get(i) else {
            return on_match(st);
        };
        if !st.tick() {
            return ControlFlow::Break(Stop::Aborted);
        }
        let mut next = |st: &mut State<'_>| -> ControlFlow<Stop> {
            for &r in &step.relations {
                if !st.relation_holds(&self.block.relations[r]) {
                    return ControlFlow::Continue(());
                }
            }
            self.step(i + 1, st, on_match)
        };
        match step.kind {
            StepKind::Check(pn) => {
                let id = st.nodes[pn].expect("shared node is bound");
                if node_holds(&self.block.nodes[pn], st.g.features(id)) {
                    next(st)?;
                }
            }
            StepKind::Scan(pn) => {
                let all: Vec<NodeId>;
                let candidates: &[NodeId] = match self.seeds {
                    Some((seeded, nodes)) if seeded == pn => nodes,
                    _ => {
                        all = st.g.node_ids().collect();
                        &all
                    }
                };
                for &id in candidates {
                    if self.bind_node(st, pn, id) {
                        let flow = next(st);
                        self.unbind_node(st, pn);
                        flow?;
                    }
                }
            }
            StepKind::EdgeBetween(pe) => {
                let e = &self.block.edges[pe];
                let (s, t) = (st.nodes[e.src].unwrap(), st.nodes[e.tgt].unwrap());
                for &eid in st.g.out_edge_ids(s) {
                    let edge = st.g.edge(eid).unwrap();
                    if edge.target != t || st.used_edges[eid.index()] || !e.labels.accepts(edge.label_str()) {
                        continue;
                    }
                    st.used_edges[eid.index()] = true;
                    st.edges[pe] = Some(eid);
                    let flow = next(st);
                    st.edges[pe] = None;
                    st.used_edges[eid.index()] = false;
                    flow?;
                }
            }
            StepKind::EdgeForward(pe) | StepKind::EdgeBackward(pe) => {
                let forward = matches!(step.kind, StepKind::EdgeForward(_));
                let e = &self.block.edges[pe];
                let (from, to) = if forward { (e.src, e.tgt) } else { (e.tgt, e.src) };
                let anchor = st.nodes[from].unwrap();
                let incident = if forward {
                    st.g.out_edge_ids(anchor)
                } else {
                    st.g.in_edge_ids(anchor)
                };
                for &eid in incident {
                    let edge = st.g.edge(eid).unwrap();
                    if st.used_edges[eid.index()] || !e.labels.accepts(edge.label_str()) {
                        continue;
                    }
                    let other = if forward { edge.target } else { edge.source };
                    if !self.bind_node(st, to, other) {
                        continue;
                    }
                    st.used_edges[eid.index()] = true;
                    st.edges[pe] = Some(eid);
                    let flow = next(st);
                    st.edges[pe] = None;
                    st.used_edges[eid.index()] = false;
                    self.unbind_node(st, to);
                    flow?;
                }
            }
        }
        ControlFlow::Continue(())
    }
}

/// Compiled `without`/`whether` block with its plan.
#[derive(Debug, Clone)]
struct Extension {
    block: Block,
    plan: Plan,
}

impl Extension {
    fn new(block: &PatternBlock, base: &Block) -> Self {
        let block = Block::compile(block, Some(base));
        let plan = Plan::new(&block, None);
        Self { block, plan }
    }

    /// Is there an extension of the base assignment in `st`?
    fn exists(&self, base: &State<'_>) -> Result<bool, BudgetExceeded> {
        let mut nodes = base.nodes.clone();
        nodes.resize(self.block.nodes.len(), None);
        let mut st = State {
            g: base.g,
            nodes,
            edges: vec![None; self.block.edges.len()],
            used_nodes: base.used_nodes.clone(),
            used_edges: base.used_edges.clone(),
            budget: base.budget,
            ticks: base.ticks,
        };
        let search = Search {
            block: &self.block,
            plan: &self.plan,
            seeds: None,
        };
        match search.run(&mut st, &mut |_| ControlFlow::Break(Stop::Found)) {
            ControlFlow::Continue(()) => Ok(false),
            ControlFlow::Break(Stop::Found) => Ok(true),
            ControlFlow::Break(Stop::Aborted) => Err(BudgetExceeded),
        }
    }
}

/// A request compiled for repeated matching.
#[derive(Debug, Clone)]
pub struct Matcher {
    request: Request,
    base: Block,
    plan: Plan,
    withouts: Vec<Extension>,
}

impl Matcher {
    pub fn new(request: &Request) -> Self {
        let base = Block::compile(&request.base, None);
        let plan = Plan::new(&base, None);
        let withouts = request
            .withouts
            .iter()
            .map(|w| Extension::new(w, &base))
            .collect();
        Self {
            request: request.clone(),
            base,
            plan,
            withouts,
        }
    }

    pub fn request(&self) -> &Request {
        &self.request
    }

    fn globals_hold(&self, g: &SemGraph) -> bool {
        self.request.globals.iter().all(|c| match c {
            GlobalConstraint::IsCyclic => g.is_cyclic(),
            GlobalConstraint::IsAcyclic => !g.is_cyclic(),
        })
    }

    fn project(&self, st: &State<'_>) -> Binding {
        let mut b = Binding::default();
        for (pn, id) in self.base.nodes.iter().zip(&st.nodes) {
            if let (Some(ident), Some(id)) = (&pn.ident, id) {
                b.nodes.insert(ident.clone(), *id);
            }
        }
        for (pe, id) in self.base.edges.iter().zip(&st.edges) {
            if let (Some(ident), Some(id)) = (&pe.ident, id) {
                b.edges.insert(ident.clone(), *id);
            }
        }
        b
    }

    /// Core loop: every surviving full assignment, projected, with the
    /// `whether` flag when a sub-pattern is given.
    fn run_graph(
        &self,
        g: &SemGraph,
        seeds: Option<(usize, &[NodeId])>,
        whether: Option<&Extension>,
        budget: &Budget,
    ) -> Result<BTreeMap<Binding, bool>, BudgetExceeded> {
        let mut found: BTreeMap<Binding, bool> = BTreeMap::new();
        if !self.globals_hold(g) {
            return Ok(found);
        }
        let seeded_plan;
        let plan = match seeds {
            Some((pn, _)) => {
                seeded_plan = Plan::new(&self.base, Some(pn));
                &seeded_plan
            }
            None => &self.plan,
        };
        let search = Search {
            block: &self.base,
            plan,
            seeds,
        };
        let mut st = State {
            g,
            nodes: vec![None; self.base.nodes.len()],
            edges: vec![None; self.base.edges.len()],
            used_nodes: vec![false; g.node_count()],
            used_edges: vec![false; g.edge_count()],
            budget,
            ticks: 0,
        };
        let mut aborted = false;
        let flow = search.run(&mut st, &mut |st| {
            for w in &self.withouts {
                match w.exists(st) {
                    Ok(true) => return ControlFlow::Continue(()),
                    Ok(false) => {}
                    Err(BudgetExceeded) => {
                        aborted = true;
                        return ControlFlow::Break(Stop::Aborted);
                    }
                }
            }
            let flag = match whether.map(|x| x.exists(st)) {
                None => false,
                Some(Ok(f)) => f,
                Some(Err(BudgetExceeded)) => {
                    aborted = true;
                    return ControlFlow::Break(Stop::Aborted);
                }
            };
            *found.entry(self.project(st)).or_default() |= flag;
            ControlFlow::Continue(())
        });
        if aborted || matches!(flow, ControlFlow::Break(Stop::Aborted)) {
            return Err(BudgetExceeded);
        }
        Ok(found)
    }

    /// All occurrences in one graph, deduplicated and sorted.
    pub fn match_graph(&self, g: &SemGraph) -> Vec<Binding> {
        self.try_match_graph(g, &Budget::unlimited())
            .expect("unlimited budget")
    }

    pub fn try_match_graph(&self, g: &SemGraph, budget: &Budget) -> Result<Vec<Binding>, BudgetExceeded> {
        Ok(self.run_graph(g, None, None, budget)?.into_keys().collect())
    }

    /// Index-driven seeding: the base node with an equality constraint whose
    /// posting list is shortest, grouped per graph.
    fn seeding<'i>(&self, index: &'i FeatureIndex) -> Option<(usize, Vec<(usize, Vec<NodeId>)>)> {
        let mut best: Option<(usize, &'i [crate::index::Posting])> = None;
        for (pn, node) in self.base.nodes.iter().enumerate() {
            for c in &node.clauses {
                if let FeatureClause::Eq(f, v) = c {
                    let postings = index.lookup(f, v);
                    if best.is_none_or(|(_, b)| postings.len() < b.len()) {
                        best = Some((pn, postings));
                    }
                }
            }
        }
        best.map(|(pn, postings)| (pn, group_by_graph(postings)))
    }

    /// Per-graph work items in corpus order: (graph index, seeds).
    fn work<'c>(
        &self,
        corpus: &'c Corpus,
        index: Option<&FeatureIndex>,
    ) -> (Vec<(usize, Option<Vec<NodeId>>)>, Option<usize>) {
        match index.and_then(|i| self.seeding(i)) {
            Some((pn, groups)) => (
                groups
                    .into_iter()
                    .map(|(g, nodes)| (g, Some(nodes)))
                    .collect(),
                Some(pn),
            ),
            None => ((0..corpus.len()).map(|g| (g, None)).collect(), None),
        }
    }

    fn run_corpus(
        &self,
        corpus: &Corpus,
        index: Option<&FeatureIndex>,
        whether: Option<&Extension>,
        budget: &Budget,
    ) -> Result<Vec<(Occurrence, bool)>, BudgetExceeded> {
        let (work, seed_node) = self.work(corpus, index);
        let per_graph: Vec<Vec<(Occurrence, bool)>> = work
            .par_iter()
            .map(|(gi, seeds)| {
                let g = &corpus.graphs()[*gi];
                let seeds = seed_node.zip(seeds.as_deref());
                let found = self.run_graph(g, seeds, whether, budget)?;
                let graph = GraphRef {
                    corpus: corpus.id.clone(),
                    sent_id: g.sent_id().unwrap_or_default().to_owned(),
                    index: *gi,
                };
                Ok(found
                    .into_iter()
                    .map(|(binding, flag)| {
                        (
                            Occurrence {
                                graph: graph.clone(),
                                binding,
                            },
                            flag,
                        )
                    })
                    .collect())
            })
            .collect::<Result<_, BudgetExceeded>>()?;
        Ok(per_graph.into_iter().flatten().collect())
    }

    /// Occurrences over a corpus, in corpus order. With an index, graphs that
    /// cannot match an equality constraint are skipped.
    pub fn match_corpus(&self, corpus: &Corpus, index: Option<&FeatureIndex>) -> Vec<Occurrence> {
        self.try_match_corpus(corpus, index, &Budget::unlimited())
            .expect("unlimited budget")
    }

    pub fn try_match_corpus(
        &self,
        corpus: &Corpus,
        index: Option<&FeatureIndex>,
        budget: &Budget,
    ) -> Result<Vec<Occurrence>, BudgetExceeded> {
        Ok(self
            .run_corpus(corpus, index, None, budget)?
            .into_iter()
            .map(|(o, _)| o)
            .collect())
    }

    /// Occurrences paired with their cluster value.
    pub fn try_match_clustered(
        &self,
        corpus: &Corpus,
        index: Option<&FeatureIndex>,
        key: &ClusterKey,
        budget: &Budget,
    ) -> Result<Vec<(Occurrence, String)>, BudgetExceeded> {
        let whether = match key {
            ClusterKey::Whether(block) => Some(Extension::new(block, &self.base)),
            _ => None,
        };
        let found = self.run_corpus(corpus, index, whether.as_ref(), budget)?;
        Ok(found
            .into_iter()
            .map(|(occ, flag)| {
                let g = &corpus.graphs()[occ.graph.index];
                let value = cluster_value(key, g, &occ.binding, flag);
                (occ, value)
            })
            .collect())
    }

    pub fn cluster(&self, key: &ClusterKey, corpus: &Corpus, index: Option<&FeatureIndex>) -> ClusterTable {
        let found = self
            .try_match_clustered(corpus, index, key, &Budget::unlimited())
            .expect("unlimited budget");
        ClusterTable::from_values(key, found.iter().map(|(_, v)| v.as_str()))
    }

    /// Graphs with at least one occurrence.
    pub fn corpus_ratio(&self, corpus: &Corpus, index: Option<&FeatureIndex>) -> CorpusRatio {
        let occs = self.match_corpus(corpus, index);
        let mut matching = 0;
        let mut last = None;
        for o in &occs {
            if last != Some(o.graph.index) {
                matching += 1;
                last = Some(o.graph.index);
            }
        }
        CorpusRatio::new(matching, corpus.len())
    }
}

fn cluster_value(key: &ClusterKey, g: &SemGraph, b: &Binding, flag: bool) -> String {
    match key {
        ClusterKey::NodeFeature(n, f) => b
            .nodes
            .get(n)
            .and_then(|&id| g.features(id).get(f))
            .unwrap_or(UNDEFINED)
            .to_owned(),
        ClusterKey::EdgeLabel(e) => b
            .edges
            .get(e)
            .and_then(|&id| g.edge(id))
            .and_then(|edge| edge.label.get(LABEL))
            .unwrap_or(UNDEFINED)
            .to_owned(),
        ClusterKey::Whether(_) => if flag { "yes" } else { "no" }.to_owned(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusRatio {
    pub matching: usize,
    pub total: usize,
    pub ratio: f64,
}

impl CorpusRatio {
    pub fn new(matching: usize, total: usize) -> Self {
        let ratio = if total == 0 {
            0.0
        } else {
            matching as f64 / total as f64
        };
        Self {
            matching,
            total,
            ratio,
        }
    }
}

/// Occurrence counts per cluster value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterTable {
    pub key: ClusterKey,
    pub rows: BTreeMap<String, usize>,
}

impl ClusterTable {
    pub fn from_values<'a>(key: &ClusterKey, values: impl IntoIterator<Item = &'a str>) -> Self {
        let mut rows = BTreeMap::new();
        if let ClusterKey::Whether(_) = key {
            rows.insert("yes".to_owned(), 0);
            rows.insert("no".to_owned(), 0);
        }
        for v in values {
            *rows.entry(v.to_owned()).or_insert(0) += 1;
        }
        Self {
            key: key.clone(),
            rows,
        }
    }

    pub fn total(&self) -> usize {
        self.rows.values().sum()
    }

    pub fn get(&self, value: &str) -> usize {
        self.rows.get(value).copied().unwrap_or(0)
    }

    /// Rows by descending count, ties by ascending value.
    pub fn sorted(&self) -> Vec<(&str, usize)> {
        let mut rows: Vec<_> = self.rows.iter().map(|(k, &v)| (k.as_str(), v)).collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        rows
    }
}

pub fn match_graph(req: &Request, g: &SemGraph) -> Vec<Binding> {
    Matcher::new(req).match_graph(g)
}

pub fn match_corpus(req: &Request, corpus: &Corpus) -> Vec<Occurrence> {
    Matcher::new(req).match_corpus(corpus, None)
}

pub fn cluster(req: &Request, key: &ClusterKey, corpus: &Corpus) -> ClusterTable {
    Matcher::new(req).cluster(key, corpus, None)
}

pub fn corpus_ratio(req: &Request, corpus: &Corpus) -> CorpusRatio {
    Matcher::new(req).corpus_ratio(corpus, None)
}
