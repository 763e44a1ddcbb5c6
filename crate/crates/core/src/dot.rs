//! Graphviz DOT export.

use std::collections::HashSet;
use std::fmt::Write;

use crate::graph::{FeatureStructure, SemGraph, LABEL};
use crate::matcher::Binding;
use crate::sbn::MEMBERSHIP;

pub const HIGHLIGHT_COLOR: &str = "blue";
pub const CONSTRAINT_COLOR: &str = "red";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

fn node_label(fs: &FeatureStructure) -> String {
    let mut lines = Vec::new();
    for key in ["concept", "value", "box"] {
        if let Some(v) = fs.get(key) {
            lines.push(v.to_owned());
        }
    }
    for (k, v) in fs.iter() {
        if !matches!(k, "concept" | "value" | "box") {
            lines.push(format!("{k}={v}"));
        }
    }
    lines.join("\n")
}

fn edge_label(fs: &FeatureStructure) -> String {
    let mut lines = vec![fs.get(LABEL).unwrap_or_default().to_owned()];
    lines.extend(
        fs.iter()
            .filter(|(k, _)| *k != LABEL)
            .map(|(k, v)| format!("{k}={v}")),
    );
    lines.join("\n")
}

/// Renders `g` as a DOT digraph. Membership edges are dotted, scope
/// constraint edges (`kind=constraint`) red, and the elements bound by
/// `highlight` are drawn in [`HIGHLIGHT_COLOR`].
pub fn to_dot(g: &SemGraph, highlight: Option<&Binding>) -> String {
    let (hl_nodes, hl_edges): (HashSet<_>, HashSet<_>) = highlight.map_or_else(Default::default, |b| {
        (b.nodes.values().copied().collect(), b.edges.values().copied().collect())
    });
    let name = g.sent_id().unwrap_or("G");
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    out.push_str("  edge [fontname=\"Helvetica\", fontsize=10];\n");
    for (id, node) in g.nodes() {
        let mut attrs = vec![format!("label=\"{}\"", escape(&node_label(&node.features)))];
        if node.features.contains("box") {
            attrs.push("shape=box".into());
        } else if node.features.contains("value") && !node.features.contains("concept") {
            attrs.push("shape=plaintext".into());
        } else {
            attrs.push("shape=ellipse".into());
        }
        if hl_nodes.contains(&id) {
            attrs.push(format!("color={HIGHLIGHT_COLOR}"));
            attrs.push(format!("fontcolor={HIGHLIGHT_COLOR}"));
            attrs.push("penwidth=2".into());
        }
        let _ = writeln!(out, "  n{} [{}];", id.0, attrs.join(", "));
    }
    for (id, edge) in g.edges() {
        let mut attrs = vec![format!("label=\"{}\"", escape(&edge_label(&edge.label)))];
        if edge.label_str() == MEMBERSHIP {
            attrs.push("style=dotted".into());
        }
        if hl_edges.contains(&id) {
            attrs.push(format!("color={HIGHLIGHT_COLOR}"));
            attrs.push(format!("fontcolor={HIGHLIGHT_COLOR}"));
            attrs.push("penwidth=2".into());
        } else if edge.label.get("kind") == Some("constraint") {
            attrs.push(format!("color={CONSTRAINT_COLOR}"));
            attrs.push(format!("fontcolor={CONSTRAINT_COLOR}"));
        }
        let _ = writeln!(
            out,
            "  n{} -> n{} [{}];",
            edge.source.0,
            edge.target.0,
            attrs.join(", ")
        );
    }
    out.push_str("}\n");
    out
}
