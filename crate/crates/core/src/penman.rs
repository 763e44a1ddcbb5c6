//! Reader for AMR graphs in Penman notation.
//!
//! Concepts `(v / concept ...)` become nodes with a `concept` feature,
//! constants become nodes with a `value` feature, and every `:role` becomes an
//! edge labeled with the role text as written (inverse `-of` roles included).

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{Corpus, FeatureStructure, GraphError, NodeId, SemGraph};
use crate::LoadReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PenmanError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Position, message: String },
    #[error("variable `{var}` at {pos} is referenced but never defined")]
    DanglingVariable { var: String, pos: Position },
    #[error("variable `{var}` at {pos} is defined twice")]
    DuplicateVariable { var: String, pos: Position },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    LParen,
    RParen,
    Slash,
    /// `:role`; the token text excludes the colon.
    Role,
    Symbol,
    StringLiteral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PenmanToken {
    pub kind: TokenKind,
    pub text: String,
    pub pos: Position,
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '/' | ':' | '"')
}

/// Splits Penman text into tokens. `line_offset` shifts reported line numbers
/// for blocks cut out of a larger file.
pub fn tokenize(text: &str, line_offset: usize) -> Result<Vec<PenmanToken>, PenmanError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1 + line_offset, 1);
    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }
    while let Some(&c) = chars.peek() {
        let pos = Position { line, col };
        let single = |kind, text: &str| PenmanToken {
            kind,
            text: text.to_owned(),
            pos,
        };
        match c {
            _ if c.is_whitespace() => {
                bump!();
            }
            '#' if col == 1 => {
                // comment line inside a block
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '(' => {
                bump!();
                tokens.push(single(TokenKind::LParen, "("));
            }
            ')' => {
                bump!();
                tokens.push(single(TokenKind::RParen, ")"));
            }
            '/' => {
                bump!();
                tokens.push(single(TokenKind::Slash, "/"));
            }
            ':' => {
                bump!();
                let mut role = String::new();
                while let Some(&c) = chars.peek() {
                    if is_delimiter(c) {
                        break;
                    }
                    role.push(c);
                    bump!();
                }
                if role.is_empty() {
                    return Err(PenmanError::Syntax {
                        pos,
                        message: "empty role name".into(),
                    });
                }
                tokens.push(PenmanToken {
                    kind: TokenKind::Role,
                    text: role,
                    pos,
                });
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        None => {
                            return Err(PenmanError::Syntax {
                                pos,
                                message: "unterminated string literal".into(),
                            })
                        }
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some(c) => s.push(c),
                            None => continue,
                        },
                        Some(c) => s.push(c),
                    }
                }
                tokens.push(PenmanToken {
                    kind: TokenKind::StringLiteral,
                    text: s,
                    pos,
                });
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if is_delimiter(c) {
                        break;
                    }
                    s.push(c);
                    bump!();
                }
                tokens.push(PenmanToken {
                    kind: TokenKind::Symbol,
                    text: s,
                    pos,
                });
            }
        }
    }
    Ok(tokens)
}

#[derive(Debug)]
struct Tree {
    var: String,
    var_pos: Position,
    concept: Option<String>,
    children: Vec<(String, Arg)>,
}

#[derive(Debug)]
enum Arg {
    Tree(Tree),
    Symbol(String, Position),
    Literal(String),
}

struct Parser {
    tokens: Vec<PenmanToken>,
    at: usize,
    end: Position,
}

impl Parser {
    fn peek(&self) -> Option<&PenmanToken> {
        self.tokens.get(self.at)
    }

    fn next(&mut self) -> Option<PenmanToken> {
        let t = self.tokens.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, PenmanError> {
        let pos = self.peek().map_or(self.end, |t| t.pos);
        Err(PenmanError::Syntax {
            pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<PenmanToken, PenmanError> {
        match self.peek() {
            Some(t) if t.kind == kind => Ok(self.next().unwrap()),
            Some(t) => self.error(format!("expected {what}, found `{}`", t.text)),
            None => self.error(format!("expected {what}, found end of input")),
        }
    }

    fn tree(&mut self) -> Result<Tree, PenmanError> {
        self.expect(TokenKind::LParen, "`(`")?;
        let var = self.expect(TokenKind::Symbol, "variable")?;
        let mut concept = None;
        if matches!(self.peek(), Some(t) if t.kind == TokenKind::Slash) {
            self.next();
            match self.next() {
                Some(t) if matches!(t.kind, TokenKind::Symbol | TokenKind::StringLiteral) => {
                    concept = Some(t.text)
                }
                _ => {
                    self.at -= 1;
                    return self.error("expected concept after `/`");
                }
            }
        }
        let mut children = Vec::new();
        loop {
            match self.peek().map(|t| t.kind) {
                Some(TokenKind::RParen) => {
                    self.next();
                    break;
                }
                Some(TokenKind::Role) => {
                    let role = self.next().unwrap().text;
                    let arg = match self.peek() {
                        Some(t) if t.kind == TokenKind::LParen => Arg::Tree(self.tree()?),
                        Some(t) if t.kind == TokenKind::Symbol => {
                            let t = self.next().unwrap();
                            Arg::Symbol(t.text, t.pos)
                        }
                        Some(t) if t.kind == TokenKind::StringLiteral => {
                            Arg::Literal(self.next().unwrap().text)
                        }
                        _ => return self.error(format!("missing argument for role `:{role}`")),
                    };
                    children.push((role, arg));
                }
                Some(_) => return self.error("expected role or `)`"),
                None => return self.error("unclosed `(`"),
            }
        }
        Ok(Tree {
            var: var.text,
            var_pos: var.pos,
            concept,
            children,
        })
    }
}

fn collect_vars(
    tree: &Tree,
    vars: &mut HashSet<String>,
) -> Result<(), PenmanError> {
    if !vars.insert(tree.var.clone()) {
        return Err(PenmanError::DuplicateVariable {
            var: tree.var.clone(),
            pos: tree.var_pos,
        });
    }
    for (_, arg) in &tree.children {
        if let Arg::Tree(t) = arg {
            collect_vars(t, vars)?;
        }
    }
    Ok(())
}

/// Symbols shaped like AMR variables (a letter and optional digits). An
/// unbound symbol of this shape is reported as a dangling variable; any other
/// unbound symbol is a constant.
fn looks_like_variable(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_digit())
}

struct Builder<'a> {
    graph: SemGraph,
    vars: &'a HashSet<String>,
    var_nodes: HashMap<String, NodeId>,
}

impl Builder<'_> {
    fn declare(&mut self, tree: &Tree) -> Result<NodeId, PenmanError> {
        let mut fs = FeatureStructure::new();
        if let Some(c) = &tree.concept {
            fs.insert("concept", c.as_str());
        }
        let id = self.graph.add_named_node(Some(tree.var.as_str()), fs)?;
        self.var_nodes.insert(tree.var.clone(), id);
        Ok(id)
    }

    /// Creates the node of every variable first, in document order, so that
    /// forward references resolve.
    fn declare_all(&mut self, tree: &Tree) -> Result<(), PenmanError> {
        self.declare(tree)?;
        for (_, arg) in &tree.children {
            if let Arg::Tree(t) = arg {
                self.declare_all(t)?;
            }
        }
        Ok(())
    }

    fn value_node(&mut self, value: &str) -> Result<NodeId, PenmanError> {
        Ok(self
            .graph
            .add_node(FeatureStructure::new().with("value", value))?)
    }

    fn edges(&mut self, tree: &Tree) -> Result<(), PenmanError> {
        let src = self.var_nodes[&tree.var];
        for (role, arg) in &tree.children {
            let tgt = match arg {
                Arg::Tree(t) => {
                    self.edges(t)?;
                    self.var_nodes[&t.var]
                }
                Arg::Symbol(s, pos) => {
                    if self.vars.contains(s) {
                        self.var_nodes[s]
                    } else if looks_like_variable(s) {
                        return Err(PenmanError::DanglingVariable {
                            var: s.clone(),
                            pos: *pos,
                        });
                    } else {
                        self.value_node(s)?
                    }
                }
                Arg::Literal(s) => self.value_node(s)?,
            };
            match self.graph.add_edge(src, tgt, FeatureStructure::label(role.as_str())) {
                // the same role repeated towards the same variable collapses
                Err(GraphError::DuplicateEdge { .. }) => {}
                other => {
                    other?;
                }
            }
        }
        Ok(())
    }
}

fn parse_tokens(tokens: Vec<PenmanToken>, end: Position) -> Result<SemGraph, PenmanError> {
    let mut parser = Parser {
        tokens,
        at: 0,
        end,
    };
    if parser.peek().is_none() {
        return parser.error("empty graph");
    }
    let tree = parser.tree()?;
    if let Some(t) = parser.peek() {
        return Err(PenmanError::Syntax {
            pos: t.pos,
            message: format!("trailing input `{}` after graph", t.text),
        });
    }
    let mut vars = HashSet::new();
    collect_vars(&tree, &mut vars)?;
    let mut builder = Builder {
        graph: SemGraph::new(),
        vars: &vars,
        var_nodes: HashMap::new(),
    };
    builder.declare_all(&tree)?;
    builder.edges(&tree)?;
    Ok(builder.graph)
}

fn end_position(text: &str, line_offset: usize) -> Position {
    let line = line_offset + text.lines().count().max(1);
    let col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    Position { line, col }
}

/// Parses a single Penman expression into an unsealed graph.
pub fn parse_penman(text: &str) -> Result<SemGraph, PenmanError> {
    let tokens = tokenize(text, 0)?;
    parse_tokens(tokens, end_position(text, 0))
}

fn parse_header(line: &str, meta: &mut FeatureStructure) {
    let Some(rest) = line.trim_start_matches('#').trim_start().strip_prefix("::") else {
        return;
    };
    // `# ::snt` takes the whole remainder of the line
    if let Some(text) = rest.strip_prefix("snt") {
        if text.is_empty() || text.starts_with(char::is_whitespace) {
            meta.insert("text", text.trim());
            return;
        }
    }
    for field in rest.split(" ::") {
        let field = field.trim();
        let (key, value) = match field.split_once(char::is_whitespace) {
            Some((k, v)) => (k, v.trim()),
            None => (field, ""),
        };
        let key = match key {
            "id" => "sent_id",
            "snt" => "text",
            other => other,
        };
        meta.insert(key, value);
    }
}

/// Parses a Penman corpus: blank-line separated blocks, each with optional
/// `# ::key value` headers followed by one graph. Blocks that fail to parse
/// are skipped and listed in the report.
pub fn parse_penman_corpus(id: &str, text: &str) -> (Corpus, LoadReport) {
    let mut corpus = Corpus::new(id);
    let mut report = LoadReport::default();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        if lines[i].trim().is_empty() {
            i += 1;
            continue;
        }
        let start = i;
        while i < lines.len() && !lines[i].trim().is_empty() {
            i += 1;
        }
        let block = &lines[start..i];
        let mut meta = FeatureStructure::new();
        let mut body_start = block.len();
        for (k, line) in block.iter().enumerate() {
            if line.trim_start().starts_with('#') {
                parse_header(line, &mut meta);
            } else {
                body_start = k;
                break;
            }
        }
        if body_start == block.len() {
            // comment-only block such as a file banner
            continue;
        }
        let body = block[body_start..].join("\n");
        let offset = start + body_start;
        let label = meta
            .get("sent_id")
            .map_or_else(|| format!("block at line {}", offset + 1), str::to_owned);
        let parsed = tokenize(&body, offset)
            .and_then(|toks| parse_tokens(toks, end_position(&body, offset)));
        match parsed {
            Ok(mut graph) => {
                graph.meta = meta;
                if let Err(e) = corpus.push(graph) {
                    report.skip(label, e.to_string());
                }
            }
            Err(e) => report.skip(label, e.to_string()),
        }
    }
    report.loaded = corpus.len();
    (corpus, report)
}
