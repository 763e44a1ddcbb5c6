//! Query language: `pattern`, `without` and `global` blocks, plus clustering
//! keys.
//!
//! ```text
//! pattern { N [concept = "say-01"] }
//! without { N -[ARG0]-> A0 }
//! without { A0 -[ARG0-of]-> N }
//! ```
//!
//! Clauses are separated by `;` or a newline. Nodes can be declared with a
//! feature list (`N [concept, value <> "-"]`) or implicitly by appearing as an
//! edge endpoint. `*` is an anonymous endpoint. Regular expressions
//! (`re"make-.*"`) must match the whole feature value.

use std::collections::BTreeSet;
use std::fmt;

use regex::Regex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at {line}:{col}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown identifier `{ident}` at {line}:{col}")]
    UnknownIdentifier {
        ident: String,
        line: usize,
        col: usize,
    },
    #[error("identifier `{ident}` at {line}:{col} names both a node and an edge")]
    IdentifierClash {
        ident: String,
        line: usize,
        col: usize,
    },
    #[error("invalid regular expression at {line}:{col}: {message}")]
    InvalidRegex {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("empty request: give a pattern or a global constraint")]
    EmptyRequest,
    #[error("unsupported clustering key `{0}`; use `N.feature`, `e.label` or `whether {{ ... }}`")]
    UnknownForm(String),
}

impl QueryError {
    /// 1-based line and column, when the error has a location.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            QueryError::Syntax { line, col, .. }
            | QueryError::UnknownIdentifier { line, col, .. }
            | QueryError::IdentifierClash { line, col, .. }
            | QueryError::InvalidRegex { line, col, .. } => Some((*line, *col)),
            QueryError::EmptyRequest | QueryError::UnknownForm(_) => None,
        }
    }
}

/// A regex compiled to match whole values; equality is on the source text.
#[derive(Debug, Clone)]
pub struct ValueRegex {
    source: String,
    compiled: Regex,
}

impl ValueRegex {
    pub fn new(source: &str) -> Result<Self, regex::Error> {
        let compiled = Regex::new(&format!("^(?:{source})$"))?;
        Ok(Self {
            source: source.to_owned(),
            compiled,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn is_match(&self, value: &str) -> bool {
        self.compiled.is_match(value)
    }
}

impl PartialEq for ValueRegex {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl Eq for ValueRegex {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureClause {
    Present(String),
    Eq(String, String),
    Neq(String, String),
    Regex(String, ValueRegex),
}

impl FeatureClause {
    pub fn feature(&self) -> &str {
        match self {
            FeatureClause::Present(f)
            | FeatureClause::Eq(f, _)
            | FeatureClause::Neq(f, _)
            | FeatureClause::Regex(f, _) => f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeConstraint {
    pub ident: String,
    pub clauses: Vec<FeatureClause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRef {
    Named(String),
    Wildcard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelSet {
    Any,
    OneOf(Vec<String>),
}

impl LabelSet {
    pub fn accepts(&self, label: &str) -> bool {
        match self {
            LabelSet::Any => true,
            LabelSet::OneOf(ls) => ls.iter().any(|l| l == label),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeConstraint {
    pub ident: Option<String>,
    pub src: NodeRef,
    pub tgt: NodeRef,
    pub labels: LabelSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Eq,
    Neq,
}

/// Cross-node feature comparison `N.f = M.g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureRelation {
    pub left: (String, String),
    pub op: Comparison,
    pub right: (String, String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternBlock {
    pub nodes: Vec<NodeConstraint>,
    pub edges: Vec<EdgeConstraint>,
    pub relations: Vec<FeatureRelation>,
}

impl PatternBlock {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty() && self.relations.is_empty()
    }

    /// Named node identifiers in order of first appearance (declarations
    /// first, then edge endpoints).
    pub fn node_idents(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let declared = self.nodes.iter().map(|n| n.ident.as_str());
        let endpoints = self.edges.iter().flat_map(|e| [&e.src, &e.tgt]).filter_map(|r| match r {
            NodeRef::Named(n) => Some(n.as_str()),
            NodeRef::Wildcard => None,
        });
        for id in declared.chain(endpoints) {
            if seen.insert(id) {
                out.push(id);
            }
        }
        out
    }

    pub fn edge_idents(&self) -> Vec<&str> {
        self.edges.iter().filter_map(|e| e.ident.as_deref()).collect()
    }

    pub fn node_constraint(&self, ident: &str) -> Option<&NodeConstraint> {
        self.nodes.iter().find(|n| n.ident == ident)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlobalConstraint {
    IsCyclic,
    IsAcyclic,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Request {
    pub base: PatternBlock,
    pub withouts: Vec<PatternBlock>,
    pub globals: Vec<GlobalConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClusterKey {
    NodeFeature(String, String),
    EdgeLabel(String),
    Whether(PatternBlock),
}

// ---------------------------------------------------------------------------
// scanner

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

type Loc = (usize, usize);

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn loc(&self) -> Loc {
        (self.line, self.col)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Skips blanks and `%` comments; reports whether a newline was crossed.
    fn skip_ws(&mut self) -> bool {
        let mut newline = false;
        while let Some(c) = self.peek() {
            if c == '%' {
                while matches!(self.peek(), Some(c) if c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                newline |= c == '\n';
                self.bump();
            } else {
                break;
            }
        }
        newline
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some('\n') => "newline".into(),
            Some(c) => format!("`{c}`"),
        }
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, QueryError> {
        Err(QueryError::Syntax {
            line: self.line,
            col: self.col,
            expected: expected.iter().map(|s| (*s).to_owned()).collect(),
            found: self.found(),
        })
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if pred(c)) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn ident(&mut self) -> Option<String> {
        if !matches!(self.peek(), Some(c) if c.is_alphabetic() || c == '_') {
            return None;
        }
        Some(
            self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '\'')
                .to_owned(),
        )
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Loc), QueryError> {
        let loc = self.loc();
        match self.ident() {
            Some(id) => Ok((id, loc)),
            None => self.error(&[what]),
        }
    }

    fn feature_name(&mut self) -> Option<String> {
        if !matches!(self.peek(), Some(c) if c.is_alphabetic() || c == '_') {
            return None;
        }
        Some(
            self.take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '-'))
                .to_owned(),
        )
    }

    /// Double-quoted literal; `\"` and `\\` are escapes, other backslashes
    /// are kept verbatim.
    fn string_lit(&mut self) -> Result<String, QueryError> {
        if self.peek() != Some('"') {
            return self.error(&["string literal"]);
        }
        let start = self.loc();
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(QueryError::Syntax {
                        line: start.0,
                        col: start.1,
                        expected: vec!["closing `\"`".into()],
                        found: "end of input".into(),
                    })
                }
                Some('"') => return Ok(out),
                Some('\\') => match self.peek() {
                    Some(c @ ('"' | '\\')) => {
                        self.bump();
                        out.push(c);
                    }
                    _ => out.push('\\'),
                },
                Some(c) => out.push(c),
            }
        }
    }
}

fn is_bare_value_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, ',' | ']' | '[' | ';' | '"' | '{' | '}' | '|')
}

fn is_bare_label_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, ']' | '|' | '"' | '[')
}

// ---------------------------------------------------------------------------
// parser

#[derive(Default)]
struct BlockBuilder {
    block: PatternBlock,
    node_locs: Vec<(String, Loc)>,
    edge_locs: Vec<(String, Loc)>,
    relation_locs: Vec<(String, Loc)>,
}

impl BlockBuilder {
    fn add_node(&mut self, ident: String, loc: Loc, clauses: Vec<FeatureClause>) {
        self.node_locs.push((ident.clone(), loc));
        match self.block.nodes.iter_mut().find(|n| n.ident == ident) {
            Some(n) => n.clauses.extend(clauses),
            None => self.block.nodes.push(NodeConstraint { ident, clauses }),
        }
    }

    fn note_ref(&mut self, r: &NodeRef, loc: Loc) {
        if let NodeRef::Named(n) = r {
            self.node_locs.push((n.clone(), loc));
        }
    }

    /// Checks identifier use. `outer` holds the base pattern's names when
    /// checking a `without` or `whether` block.
    fn finish(self, outer: Option<&(BTreeSet<String>, BTreeSet<String>)>) -> Result<PatternBlock, QueryError> {
        let mut nodes: BTreeSet<String> = self.node_locs.iter().map(|(n, _)| n.clone()).collect();
        let mut edges = BTreeSet::new();
        for (e, loc) in &self.edge_locs {
            if nodes.contains(e) || outer.is_some_and(|(n, _)| n.contains(e)) {
                return Err(QueryError::IdentifierClash {
                    ident: e.clone(),
                    line: loc.0,
                    col: loc.1,
                });
            }
            if !edges.insert(e.clone()) || outer.is_some_and(|(_, es)| es.contains(e)) {
                return Err(QueryError::IdentifierClash {
                    ident: e.clone(),
                    line: loc.0,
                    col: loc.1,
                });
            }
        }
        for (n, loc) in &self.node_locs {
            if outer.is_some_and(|(_, es)| es.contains(n)) {
                return Err(QueryError::IdentifierClash {
                    ident: n.clone(),
                    line: loc.0,
                    col: loc.1,
                });
            }
        }
        if let Some((outer_nodes, _)) = outer {
            nodes.extend(outer_nodes.iter().cloned());
        }
        for (n, loc) in &self.relation_locs {
            if !nodes.contains(n) {
                return Err(QueryError::UnknownIdentifier {
                    ident: n.clone(),
                    line: loc.0,
                    col: loc.1,
                });
            }
        }
        Ok(self.block)
    }
}

struct Parser<'a> {
    s: Scanner<'a>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            s: Scanner::new(src),
        }
    }

    fn expect_char(&mut self, c: char) -> Result<(), QueryError> {
        self.s.skip_ws();
        if self.s.peek() == Some(c) {
            self.s.bump();
            Ok(())
        } else {
            self.s.error(&[&format!("`{c}`")])
        }
    }

    /// Runs `clause` for each clause of a `{ ... }` body.
    fn block_body(
        &mut self,
        mut clause: impl FnMut(&mut Self) -> Result<(), QueryError>,
    ) -> Result<(), QueryError> {
        self.expect_char('{')?;
        loop {
            self.s.skip_ws();
            match self.s.peek() {
                Some('}') => {
                    self.s.bump();
                    return Ok(());
                }
                Some(';') => {
                    self.s.bump();
                    continue;
                }
                None => return self.s.error(&["clause", "`}`"]),
                _ => {}
            }
            clause(self)?;
            let newline = self.s.skip_ws();
            match self.s.peek() {
                Some(';') => {
                    self.s.bump();
                }
                Some('}') => {}
                _ if newline => {}
                _ => return self.s.error(&["`;`", "newline", "`}`"]),
            }
        }
    }

    fn pattern_block(&mut self) -> Result<BlockBuilder, QueryError> {
        let mut b = BlockBuilder::default();
        self.block_body(|p| p.clause(&mut b))?;
        Ok(b)
    }

    fn node_ref(&mut self) -> Result<(NodeRef, Loc), QueryError> {
        self.s.skip_ws();
        let loc = self.s.loc();
        if self.s.eat("*") {
            return Ok((NodeRef::Wildcard, loc));
        }
        match self.s.ident() {
            Some(id) => Ok((NodeRef::Named(id), loc)),
            None => self.s.error(&["node identifier", "`*`"]),
        }
    }

    fn arrow(&mut self) -> Result<LabelSet, QueryError> {
        self.s.skip_ws();
        if self.s.eat("->") {
            return Ok(LabelSet::Any);
        }
        if !self.s.eat("-[") {
            return self.s.error(&["`->`", "`-[`"]);
        }
        let mut labels = Vec::new();
        loop {
            self.s.skip_ws();
            let label = match self.s.peek() {
                Some('"') => self.s.string_lit()?,
                Some('^') => return self.s.error(&["edge label (negated label sets are not supported)"]),
                _ => self.s.take_while(is_bare_label_char).to_owned(),
            };
            if label.is_empty() {
                return self.s.error(&["edge label"]);
            }
            labels.push(label);
            self.s.skip_ws();
            if self.s.eat("|") {
                continue;
            }
            if self.s.eat("]->") {
                return Ok(LabelSet::OneOf(labels));
            }
            return self.s.error(&["`|`", "`]->`"]);
        }
    }

    fn edge_rest(
        &mut self,
        b: &mut BlockBuilder,
        ident: Option<(String, Loc)>,
        src: (NodeRef, Loc),
    ) -> Result<(), QueryError> {
        let labels = self.arrow()?;
        let tgt = self.node_ref()?;
        b.note_ref(&src.0, src.1);
        b.note_ref(&tgt.0, tgt.1);
        if let Some((id, loc)) = &ident {
            b.edge_locs.push((id.clone(), *loc));
        }
        b.block.edges.push(EdgeConstraint {
            ident: ident.map(|(i, _)| i),
            src: src.0,
            tgt: tgt.0,
            labels,
        });
        Ok(())
    }

    fn clause(&mut self, b: &mut BlockBuilder) -> Result<(), QueryError> {
        let loc = self.s.loc();
        if self.s.peek() == Some('*') {
            self.s.bump();
            return self.edge_rest(b, None, (NodeRef::Wildcard, loc));
        }
        let (id, loc) = self.s.expect_ident("clause")?;
        self.s.skip_ws();
        match self.s.peek() {
            Some('[') => {
                let clauses = self.feature_list()?;
                b.add_node(id, loc, clauses);
                Ok(())
            }
            Some(':') => {
                self.s.bump();
                let src = self.node_ref()?;
                self.edge_rest(b, Some((id, loc)), src)
            }
            Some('.') => {
                self.s.bump();
                let Some(lf) = self.s.feature_name() else {
                    return self.s.error(&["feature name"]);
                };
                self.s.skip_ws();
                let op = if self.s.eat("=") {
                    Comparison::Eq
                } else if self.s.eat("<>") || self.s.eat("!=") {
                    Comparison::Neq
                } else {
                    return self.s.error(&["`=`", "`<>`"]);
                };
                self.s.skip_ws();
                let (rid, rloc) = self.s.expect_ident("node identifier")?;
                if !self.s.eat(".") {
                    return self.s.error(&["`.`"]);
                }
                let Some(rf) = self.s.feature_name() else {
                    return self.s.error(&["feature name"]);
                };
                b.relation_locs.push((id.clone(), loc));
                b.relation_locs.push((rid.clone(), rloc));
                b.block.relations.push(FeatureRelation {
                    left: (id, lf),
                    op,
                    right: (rid, rf),
                });
                Ok(())
            }
            Some('-') => self.edge_rest(b, None, (NodeRef::Named(id), loc)),
            _ => self.s.error(&["`[`", "`->`", "`-[`", "`:`", "`.`"]),
        }
    }

    fn value(&mut self) -> Result<String, QueryError> {
        self.s.skip_ws();
        if self.s.peek() == Some('"') {
            return self.s.string_lit();
        }
        let v = self.s.take_while(is_bare_value_char);
        if v.is_empty() {
            return self.s.error(&["value"]);
        }
        Ok(v.to_owned())
    }

    fn feature_list(&mut self) -> Result<Vec<FeatureClause>, QueryError> {
        self.expect_char('[')?;
        let mut clauses = Vec::new();
        self.s.skip_ws();
        if self.s.eat("]") {
            return Ok(clauses);
        }
        loop {
            self.s.skip_ws();
            let Some(name) = self.s.feature_name() else {
                return self.s.error(&["feature name"]);
            };
            self.s.skip_ws();
            let clause = if self.s.eat("<>") || self.s.eat("!=") {
                FeatureClause::Neq(name, self.value()?)
            } else if self.s.eat("=") {
                self.s.skip_ws();
                if self.s.rest().starts_with("re\"") {
                    let loc = self.s.loc();
                    self.s.eat("re");
                    let src = self.s.string_lit()?;
                    let re = ValueRegex::new(&src).map_err(|e| QueryError::InvalidRegex {
                        line: loc.0,
                        col: loc.1,
                        message: e.to_string(),
                    })?;
                    FeatureClause::Regex(name, re)
                } else {
                    FeatureClause::Eq(name, self.value()?)
                }
            } else {
                FeatureClause::Present(name)
            };
            clauses.push(clause);
            self.s.skip_ws();
            if self.s.eat(",") {
                continue;
            }
            if self.s.eat("]") {
                return Ok(clauses);
            }
            return self.s.error(&["`,`", "`]`", "`=`", "`<>`"]);
        }
    }

    fn globals(&mut self, out: &mut Vec<GlobalConstraint>) -> Result<(), QueryError> {
        self.block_body(|p| {
            let loc = p.s.loc();
            let name = p.s.ident().unwrap_or_default();
            let g = match name.as_str() {
                "is_cyclic" => GlobalConstraint::IsCyclic,
                "is_acyclic" | "is_not_cyclic" => GlobalConstraint::IsAcyclic,
                _ => {
                    return Err(QueryError::Syntax {
                        line: loc.0,
                        col: loc.1,
                        expected: vec!["`is_cyclic`".into(), "`is_acyclic`".into()],
                        found: if name.is_empty() { p.s.found() } else { format!("`{name}`") },
                    })
                }
            };
            out.push(g);
            Ok(())
        })
    }

    fn request(&mut self) -> Result<Request, QueryError> {
        let mut base = BlockBuilder::default();
        let mut withouts = Vec::new();
        let mut globals = Vec::new();
        loop {
            self.s.skip_ws();
            if self.s.peek().is_none() {
                break;
            }
            let loc = self.s.loc();
            match self.s.ident().as_deref() {
                Some("pattern") => {
                    let b = self.pattern_block()?;
                    base.block.nodes.extend(b.block.nodes);
                    base.block.edges.extend(b.block.edges);
                    base.block.relations.extend(b.block.relations);
                    base.node_locs.extend(b.node_locs);
                    base.edge_locs.extend(b.edge_locs);
                    base.relation_locs.extend(b.relation_locs);
                }
                Some("without") => withouts.push(self.pattern_block()?),
                Some("global") => self.globals(&mut globals)?,
                other => {
                    return Err(QueryError::Syntax {
                        line: loc.0,
                        col: loc.1,
                        expected: vec!["`pattern`".into(), "`without`".into(), "`global`".into()],
                        found: other.map_or_else(|| self.s.found(), |w| format!("`{w}`")),
                    })
                }
            }
        }
        merge_duplicate_nodes(&mut base.block);
        let base = base.finish(None)?;
        if base.is_empty() && globals.is_empty() {
            return Err(QueryError::EmptyRequest);
        }
        let scope = scope_of(&base);
        let withouts = withouts
            .into_iter()
            .map(|w| w.finish(Some(&scope)))
            .collect::<Result<_, _>>()?;
        Ok(Request {
            base,
            withouts,
            globals,
        })
    }
}

fn merge_duplicate_nodes(block: &mut PatternBlock) {
    let mut merged: Vec<NodeConstraint> = Vec::new();
    for n in block.nodes.drain(..) {
        match merged.iter_mut().find(|m| m.ident == n.ident) {
            Some(m) => m.clauses.extend(n.clauses),
            None => merged.push(n),
        }
    }
    block.nodes = merged;
}

fn scope_of(base: &PatternBlock) -> (BTreeSet<String>, BTreeSet<String>) {
    (
        base.node_idents().into_iter().map(str::to_owned).collect(),
        base.edge_idents().into_iter().map(str::to_owned).collect(),
    )
}

pub fn parse_request(text: &str) -> Result<Request, QueryError> {
    Parser::new(text).request()
}

/// Parses a clustering key: `N.feature`, `e.label`, or `whether { ... }`.
pub fn parse_cluster_key(text: &str, req: &Request) -> Result<ClusterKey, QueryError> {
    let trimmed = text.trim();
    let mut p = Parser::new(text);
    p.s.skip_ws();
    let (ident, loc) = match p.s.ident() {
        Some(id) => (id, (1, 1)),
        None => return Err(QueryError::UnknownForm(trimmed.to_owned())),
    };
    let (nodes, edges) = scope_of(&req.base);
    if ident == "whether" {
        p.s.skip_ws();
        if p.s.peek() == Some('{') {
            let b = p.pattern_block()?;
            p.s.skip_ws();
            if p.s.peek().is_some() {
                return p.s.error(&["end of input"]);
            }
            return Ok(ClusterKey::Whether(b.finish(Some(&(nodes, edges)))?));
        }
    }
    if !p.s.eat(".") {
        return Err(QueryError::UnknownForm(trimmed.to_owned()));
    }
    let Some(feature) = p.s.feature_name() else {
        return Err(QueryError::UnknownForm(trimmed.to_owned()));
    };
    p.s.skip_ws();
    if p.s.peek().is_some() {
        return Err(QueryError::UnknownForm(trimmed.to_owned()));
    }
    if edges.contains(&ident) {
        return if feature == crate::graph::LABEL {
            Ok(ClusterKey::EdgeLabel(ident))
        } else {
            Err(QueryError::UnknownForm(trimmed.to_owned()))
        };
    }
    if nodes.contains(&ident) {
        return Ok(ClusterKey::NodeFeature(ident, feature));
    }
    Err(QueryError::UnknownIdentifier {
        ident,
        line: loc.0,
        col: loc.1,
    })
}

// ---------------------------------------------------------------------------
// printing

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn is_bare_label(s: &str) -> bool {
    !s.is_empty() && !s.starts_with('^') && s.chars().all(is_bare_label_char) && !s.contains("->")
}

impl fmt::Display for FeatureClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureClause::Present(n) => write!(f, "{n}"),
            FeatureClause::Eq(n, v) => write!(f, "{n} = {}", quote(v)),
            FeatureClause::Neq(n, v) => write!(f, "{n} <> {}", quote(v)),
            FeatureClause::Regex(n, r) => write!(f, "{n} = re{}", quote(r.as_str())),
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Named(n) => f.write_str(n),
            NodeRef::Wildcard => f.write_str("*"),
        }
    }
}

impl fmt::Display for EdgeConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(id) = &self.ident {
            write!(f, "{id}: ")?;
        }
        match &self.labels {
            LabelSet::Any => write!(f, "{} -> {}", self.src, self.tgt),
            LabelSet::OneOf(ls) => {
                let ls: Vec<_> = ls
                    .iter()
                    .map(|l| if is_bare_label(l) { l.clone() } else { quote(l) })
                    .collect();
                write!(f, "{} -[{}]-> {}", self.src, ls.join("|"), self.tgt)
            }
        }
    }
}

impl fmt::Display for PatternBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut clauses = Vec::new();
        for n in &self.nodes {
            let cs: Vec<_> = n.clauses.iter().map(ToString::to_string).collect();
            clauses.push(format!("{} [{}]", n.ident, cs.join(", ")));
        }
        clauses.extend(self.edges.iter().map(ToString::to_string));
        for r in &self.relations {
            let op = match r.op {
                Comparison::Eq => "=",
                Comparison::Neq => "<>",
            };
            clauses.push(format!("{}.{} {op} {}.{}", r.left.0, r.left.1, r.right.0, r.right.1));
        }
        if clauses.is_empty() {
            f.write_str("{ }")
        } else {
            write!(f, "{{ {} }}", clauses.join("; "))
        }
    }
}

impl fmt::Display for Request {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.base.is_empty() || self.globals.is_empty() {
            parts.push(format!("pattern {}", self.base));
        }
        for w in &self.withouts {
            parts.push(format!("without {w}"));
        }
        if !self.globals.is_empty() {
            let gs: Vec<_> = self
                .globals
                .iter()
                .map(|g| match g {
                    GlobalConstraint::IsCyclic => "is_cyclic",
                    GlobalConstraint::IsAcyclic => "is_acyclic",
                })
                .collect();
            parts.push(format!("global {{ {} }}", gs.join("; ")));
        }
        f.write_str(&parts.join("\n"))
    }
}

impl fmt::Display for ClusterKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClusterKey::NodeFeature(n, feat) => write!(f, "{n}.{feat}"),
            ClusterKey::EdgeLabel(e) => write!(f, "{e}.label"),
            ClusterKey::Whether(b) => write!(f, "whether {b}"),
        }
    }
}
