//! Reader for Parallel Meaning Bank documents in Simplified Box Notation.
//!
//! Boxes are explicit nodes (`{box: "B<n>"}`). A connective line such as
//! `NEGATION -1` opens a new box linked from an earlier box by an edge
//! labeled with the connective. Sense lines become concept nodes and every
//! non-box node gets one `in` edge pointing to the box it belongs to.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

use crate::graph::{Corpus, FeatureStructure, GraphError, NodeId, SemGraph};
use crate::LoadReport;

pub const MEMBERSHIP: &str = "in";

const KNOWN_CONNECTIVES: &[&str] = &[
    "ALTERNATION",
    "ATTRIBUTION",
    "COMMENTARY",
    "CONDITION",
    "CONSEQUENCE",
    "CONTINUATION",
    "CONTRAST",
    "ELABORATION",
    "EXPLANATION",
    "NECESSITY",
    "NEGATION",
    "POSSIBILITY",
    "PRECONDITION",
    "RESULT",
    "SOURCE",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SbnError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: index {index} resolves outside the document")]
    IndexOutOfRange { line: usize, index: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SbnArg {
    /// Signed offset such as `+1` or `-2`.
    RelativeIndex(i64),
    Constant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Sense,
    Connective,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SbnLine {
    pub kind: LineKind,
    pub head: String,
    pub args: Vec<(String, SbnArg)>,
    /// 1-based line number in the source text.
    pub line: usize,
}

/// `lemma.pos.NN`, e.g. `be.v.01` or `prime_number.n.01`.
pub fn is_sense(token: &str) -> bool {
    let mut parts = token.rsplitn(3, '.');
    let (Some(num), Some(pos), Some(lemma)) = (parts.next(), parts.next(), parts.next()) else {
        return false;
    };
    !lemma.is_empty()
        && !lemma.chars().any(char::is_whitespace)
        && pos.len() == 1
        && pos.chars().all(|c| c.is_ascii_lowercase())
        && !num.is_empty()
        && num.chars().all(|c| c.is_ascii_digit())
}

fn is_connective_head(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_ascii_uppercase())
        && token
            .chars()
            .all(|c| c.is_ascii_uppercase() || c == '_' || c == '-')
}

fn is_role(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && token
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Box references accept `-1`, `+1`, and the `<1` / `>1` spellings.
fn box_offset(token: &str) -> Option<i64> {
    let (sign, digits) = match token.chars().next()? {
        '-' | '<' => (-1, &token[1..]),
        '+' | '>' => (1, &token[1..]),
        _ => return None,
    };
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse::<i64>().ok().map(|d| sign * d)
}

fn parse_arg(token: &str) -> SbnArg {
    if let Some(rest) = token.strip_prefix(['-', '+']) {
        if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
            if let Ok(k) = token.parse::<i64>() {
                return SbnArg::RelativeIndex(k);
            }
        }
    }
    let value = token
        .strip_prefix('"')
        .and_then(|t| t.strip_suffix('"'))
        .unwrap_or(token);
    SbnArg::Constant(value.to_owned())
}

/// Splits a line into tokens, keeping quoted strings whole and dropping a
/// `%` comment suffix.
fn split_line(raw: &str, line: usize) -> Result<Vec<String>, SbnError> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in raw.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                cur.push(c);
            }
            '%' if !quoted => break,
            c if c.is_whitespace() && !quoted => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if quoted {
        return Err(SbnError::Syntax {
            line,
            message: "unterminated string".into(),
        });
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    Ok(tokens)
}

/// Tokenizes a document into lines. Unknown uppercase connectives are
/// accepted and reported through `warnings`.
pub fn parse_lines(text: &str, warnings: &mut Vec<String>) -> Result<Vec<SbnLine>, SbnError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens = split_line(raw, line)?;
        let Some((head, rest)) = tokens.split_first() else {
            continue;
        };
        let kind = if is_sense(head) {
            LineKind::Sense
        } else if is_connective_head(head) && rest.first().and_then(|t| box_offset(t)).is_some() {
            if !KNOWN_CONNECTIVES.contains(&head.as_str()) {
                warnings.push(format!("line {line}: unknown connective `{head}`"));
            }
            LineKind::Connective
        } else {
            return Err(SbnError::Syntax {
                line,
                message: format!("`{head}` is neither a sense nor a box connective"),
            });
        };
        let mut args = Vec::new();
        match kind {
            LineKind::Connective => {
                let offset = box_offset(&rest[0]).unwrap_or(-1);
                args.push((head.clone(), SbnArg::RelativeIndex(offset)));
                if rest.len() > 1 {
                    return Err(SbnError::Syntax {
                        line,
                        message: format!("unexpected `{}` after connective", rest[1]),
                    });
                }
            }
            LineKind::Sense => {
                if rest.len() % 2 != 0 {
                    return Err(SbnError::Syntax {
                        line,
                        message: format!("role `{}` has no argument", rest[rest.len() - 1]),
                    });
                }
                for pair in rest.chunks(2) {
                    if !is_role(&pair[0]) {
                        return Err(SbnError::Syntax {
                            line,
                            message: format!("`{}` is not a role name", pair[0]),
                        });
                    }
                    args.push((pair[0].clone(), parse_arg(&pair[1])));
                }
            }
        }
        out.push(SbnLine {
            kind,
            head: head.clone(),
            args,
            line,
        });
    }
    Ok(out)
}

fn in_edge(g: &mut SemGraph, node: NodeId, current_box: NodeId) -> Result<(), SbnError> {
    g.add_edge(node, current_box, FeatureStructure::label(MEMBERSHIP))?;
    Ok(())
}

/// Parses one SBN document into a graph, collecting warnings.
pub fn parse_sbn_with_warnings(text: &str) -> Result<(SemGraph, Vec<String>), SbnError> {
    let mut warnings = Vec::new();
    let lines = parse_lines(text, &mut warnings)?;
    let mut g = SemGraph::new();
    let mut boxes = vec![g.add_named_node(Some("B1"), FeatureStructure::new().with("box", "B1"))?];
    // the box each sense line sits in, and its node
    let mut senses: Vec<(NodeId, NodeId)> = Vec::new();

    for l in &lines {
        match l.kind {
            LineKind::Connective => {
                let SbnArg::RelativeIndex(offset) = l.args[0].1 else {
                    unreachable!("connective argument is always an index")
                };
                // -1 is the most recent box; boxes cannot point forward
                let from = (offset < 0).then(|| boxes.len() as i64 + offset);
                let Some(&from) = from
                    .and_then(|i| usize::try_from(i).ok())
                    .and_then(|i| boxes.get(i))
                else {
                    return Err(SbnError::IndexOutOfRange {
                        line: l.line,
                        index: offset.to_string(),
                    });
                };
                let name = format!("B{}", boxes.len() + 1);
                let new_box =
                    g.add_named_node(Some(name.as_str()), FeatureStructure::new().with("box", name.as_str()))?;
                g.add_edge(from, new_box, FeatureStructure::label(l.head.as_str()))?;
                boxes.push(new_box);
            }
            LineKind::Sense => {
                let name = format!("s{}", senses.len() + 1);
                let node = g.add_named_node(
                    Some(name),
                    FeatureStructure::new().with("concept", l.head.as_str()),
                )?;
                let current = *boxes.last().unwrap();
                in_edge(&mut g, node, current)?;
                senses.push((node, current));
            }
        }
    }

    let sense_lines = lines.iter().filter(|l| l.kind == LineKind::Sense);
    for (k, l) in sense_lines.enumerate() {
        let (node, current) = senses[k];
        for (role, arg) in &l.args {
            let target = match arg {
                SbnArg::RelativeIndex(offset) => {
                    let t = k as i64 + offset;
                    match usize::try_from(t).ok().and_then(|t| senses.get(t)) {
                        Some(&(t, _)) => t,
                        None => {
                            return Err(SbnError::IndexOutOfRange {
                                line: l.line,
                                index: format!("{offset:+}"),
                            })
                        }
                    }
                }
                SbnArg::Constant(c) => {
                    let v = g.add_node(FeatureStructure::new().with("value", c.as_str()))?;
                    in_edge(&mut g, v, current)?;
                    v
                }
            };
            match g.add_edge(node, target, FeatureStructure::label(role.as_str())) {
                Err(GraphError::DuplicateEdge { .. }) => {}
                other => {
                    other?;
                }
            }
        }
    }
    Ok((g, warnings))
}

pub fn parse_sbn(text: &str) -> Result<SemGraph, SbnError> {
    parse_sbn_with_warnings(text).map(|(g, _)| g)
}

/// Document id from a PMB path: `.../pXX/dYYYY/xx.drs.sbn` → `pXX/dYYYY`.
/// Files outside that layout are identified by their path relative to
/// `root`, without extension.
fn document_id(root: &Path, file: &Path) -> String {
    let dir = file.parent();
    let d = dir.and_then(Path::file_name).and_then(|s| s.to_str());
    let p = dir
        .and_then(Path::parent)
        .and_then(Path::file_name)
        .and_then(|s| s.to_str());
    let shaped = |s: &str, c: char| {
        s.len() > 1 && s.starts_with(c) && s[1..].chars().all(|x| x.is_ascii_digit())
    };
    if let (Some(p), Some(d)) = (p, d) {
        if shaped(p, 'p') && shaped(d, 'd') {
            return format!("{p}/{d}");
        }
    }
    let rel = file.strip_prefix(root).unwrap_or(file);
    let stem = rel.with_extension("");
    let mut s = stem.to_string_lossy().replace('\\', "/");
    if let Some(stripped) = s.strip_suffix(".drs") {
        s = stripped.to_owned();
    }
    s
}

fn raw_text(file: &Path) -> Option<String> {
    let dir = file.parent()?;
    let name = file.file_name()?.to_str()?;
    let lang = name.split('.').next()?;
    let candidate = dir.join(format!("{lang}.raw"));
    fs::read_to_string(candidate)
        .ok()
        .map(|t| t.split_whitespace().collect::<Vec<_>>().join(" "))
}

/// Lists `.sbn` files under `root` (or `root` itself when it is a file) in
/// sorted path order.
pub fn sbn_files(root: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = WalkDir::new(root)
        .follow_links(true)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .filter(|p| p.extension().is_some_and(|x| x == "sbn"))
        .collect();
    files.sort();
    files
}

/// Loads every SBN document below `root`. Failing documents are skipped and
/// reported.
pub fn parse_sbn_corpus(id: &str, root: &Path) -> (Corpus, LoadReport) {
    let mut corpus = Corpus::new(id);
    let mut report = LoadReport::default();
    for file in sbn_files(root) {
        let doc_id = document_id(root, &file);
        let text = match fs::read_to_string(&file) {
            Ok(t) => t,
            Err(e) => {
                report.skip(doc_id, e.to_string());
                continue;
            }
        };
        match parse_sbn_with_warnings(&text) {
            Ok((mut g, warnings)) => {
                g.meta.insert("sent_id", doc_id.as_str());
                if let Some(t) = raw_text(&file) {
                    g.meta.insert("text", t);
                }
                report
                    .warnings
                    .extend(warnings.into_iter().map(|w| format!("{doc_id}: {w}")));
                if let Err(e) = corpus.push(g) {
                    report.skip(doc_id, e.to_string());
                }
            }
            Err(e) => report.skip(doc_id, e.to_string()),
        }
    }
    report.loaded = corpus.len();
    (corpus, report)
}
