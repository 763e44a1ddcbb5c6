use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde_json::json;

use semgraph_core::corpus::{CorpusConfig, CorpusStats, LoadedCorpus};
use semgraph_core::dot::to_dot;
use semgraph_core::interchange::{read_graphs, write_graph, write_graphs};
use semgraph_core::matcher::{ClusterTable, Matcher, Occurrence};
use semgraph_core::penman::parse_penman_corpus;
use semgraph_core::query::{parse_cluster_key, parse_request, QueryError};
use semgraph_core::recipes;
use semgraph_core::sbn::{parse_sbn_corpus, parse_sbn_with_warnings};
use semgraph_core::{LoadReport, SemGraph};

use crate::{InputFormat, OutputFormat};

pub type Result<T> = std::result::Result<T, String>;

pub enum RequestSource {
    Inline(String),
    File(PathBuf),
}

impl RequestSource {
    /// clap guarantees exactly one of the two is present.
    pub fn new(inline: Option<String>, file: Option<PathBuf>) -> Self {
        match (inline, file) {
            (Some(t), _) => RequestSource::Inline(t),
            (None, Some(f)) => RequestSource::File(f),
            (None, None) => unreachable!("clap requires one request source"),
        }
    }

    fn text(&self) -> Result<String> {
        match self {
            RequestSource::Inline(t) => Ok(t.clone()),
            RequestSource::File(p) => {
                fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))
            }
        }
    }
}

fn read_input(input: &str) -> Result<String> {
    if input == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("cannot read stdin: {e}"))?;
        Ok(s)
    } else {
        fs::read_to_string(input).map_err(|e| format!("cannot read {input}: {e}"))
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
            Ok(())
        }
    }
}

fn report_problems(report: &LoadReport) -> bool {
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for (id, reason) in &report.skipped {
        eprintln!("error: [{id}] {reason}");
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    !report.is_clean()
}

pub fn convert(
    input: &str,
    from: InputFormat,
    to: OutputFormat,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let mut failed = false;
    // interchange input keeps its single-document or array shape
    let mut as_array = false;
    let graphs: Vec<SemGraph> = match from {
        InputFormat::Penman => {
            let (corpus, report) = parse_penman_corpus("input", &read_input(input)?);
            failed |= report_problems(&report);
            corpus.graphs().to_vec()
        }
        InputFormat::Sbn if input != "-" && Path::new(input).is_dir() => {
            let (corpus, report) = parse_sbn_corpus("input", Path::new(input));
            failed |= report_problems(&report);
            corpus.graphs().to_vec()
        }
        InputFormat::Sbn => match parse_sbn_with_warnings(&read_input(input)?) {
            Ok((g, warnings)) => {
                for w in warnings {
                    eprintln!("warning: {w}");
                }
                vec![g.sealed()]
            }
            Err(e) => {
                eprintln!("error: [{input}] {e}");
                failed = true;
                Vec::new()
            }
        },
        InputFormat::Interchange => {
            let text = read_input(input)?;
            as_array = text.trim_start().starts_with('[');
            read_graphs(&text).map_err(|e| format!("[{input}] {e}"))?
        }
    };
    let text = match to {
        OutputFormat::Interchange if graphs.len() == 1 && !as_array => write_graph(&graphs[0]),
        OutputFormat::Interchange => write_graphs(&graphs),
        OutputFormat::Dot => graphs.iter().map(|g| to_dot(g, None)).collect(),
    };
    if !(failed && graphs.is_empty()) {
        emit(output, &text)?;
    }
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn load(id: &str, config: Option<&Path>) -> Result<LoadedCorpus> {
    let cfg = CorpusConfig::locate(config).map_err(|e| e.to_string())?;
    let entry = cfg
        .corpus
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| format!("unknown corpus `{id}`"))?;
    let loaded = LoadedCorpus::load(entry);
    if let Some(e) = &loaded.report.error {
        return Err(format!("corpus `{id}`: {e}"));
    }
    Ok(loaded)
}

/// The offending request line with a caret under the error column.
pub fn caret(text: &str, err: &QueryError) -> String {
    let mut out = format!("{err}\n");
    if let Some((line, col)) = err.position() {
        let src = text.lines().nth(line - 1).unwrap_or("");
        let _ = writeln!(out, "  {src}");
        let pad: String = src
            .chars()
            .take(col.saturating_sub(1))
            .map(|c| if c == '\t' { '\t' } else { ' ' })
            .collect();
        let _ = writeln!(out, "  {pad}^");
    }
    out
}

fn occurrence_line(corpus: &LoadedCorpus, o: &Occurrence) -> String {
    let g = &corpus.corpus.graphs()[o.graph.index];
    let mut parts = vec![o.graph.sent_id.clone()];
    parts.extend(o.binding.nodes.iter().map(|(k, &n)| format!("{k}={}", g.node_key(n))));
    parts.extend(o.binding.edges.iter().map(|(k, e)| format!("{k}=#{}", e.0)));
    parts.join("\t")
}

fn occurrence_json(corpus: &LoadedCorpus, o: &Occurrence) -> serde_json::Value {
    let g = &corpus.corpus.graphs()[o.graph.index];
    let nodes: serde_json::Map<_, _> = o
        .binding
        .nodes
        .iter()
        .map(|(k, &n)| (k.clone(), json!(g.node_key(n))))
        .collect();
    json!({"sent_id": o.graph.sent_id, "nodes": nodes, "edges": o.binding.edges})
}

pub fn grep(
    id: &str,
    config: Option<&Path>,
    source: RequestSource,
    cluster: Option<&str>,
    count: bool,
    json: bool,
) -> Result<ExitCode> {
    let text = source.text()?;
    let req = match parse_request(&text) {
        Ok(r) => r,
        Err(e) => {
            eprint!("{}", caret(&text, &e));
            return Ok(ExitCode::from(1));
        }
    };
    let key = match cluster.map(|k| parse_cluster_key(k, &req)).transpose() {
        Ok(k) => k,
        Err(e) => {
            eprint!("{}", caret(cluster.unwrap_or_default(), &e));
            return Ok(ExitCode::from(1));
        }
    };
    let corpus = load(id, config)?;
    let matcher = Matcher::new(&req);
    let mut out = String::new();
    match key {
        Some(key) => {
            let table = matcher.cluster(&key, &corpus.corpus, Some(&corpus.index));
            out = cluster_output(&table, json);
        }
        None => {
            let occs = matcher.match_corpus(&corpus.corpus, Some(&corpus.index));
            if count && json {
                out = format!("{}\n", json!({"total": occs.len()}));
            } else if count {
                out = format!("{}\n", occs.len());
            } else if json {
                let items: Vec<_> = occs.iter().map(|o| occurrence_json(&corpus, o)).collect();
                out = format!("{}\n", json!({"total": occs.len(), "occurrences": items}));
            } else {
                for o in &occs {
                    out.push_str(&occurrence_line(&corpus, o));
                    out.push('\n');
                }
            }
        }
    }
    emit(None, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn cluster_output(table: &ClusterTable, json: bool) -> String {
    let rows = table.sorted();
    if json {
        let rows: Vec<_> = rows.iter().map(|(v, c)| json!({"value": v, "count": c})).collect();
        return format!("{}\n", json!({"total": table.total(), "clusters": rows}));
    }
    let width = rows.iter().map(|(v, _)| v.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (v, c) in rows {
        let _ = writeln!(out, "{v:<width$}  {c}");
    }
    out
}

pub fn lint(id: &str, config: Option<&Path>, pack: &str, json: bool) -> Result<ExitCode> {
    let corpus = load(id, config)?;
    let rows = recipes::lint(pack, &corpus.corpus, Some(&corpus.index)).map_err(|e| e.to_string())?;
    let mut out = String::new();
    if json {
        let rows: Vec<_> = rows
            .iter()
            .map(|r| {
                json!({
                    "recipe": r.recipe,
                    "count": r.count,
                    "baseline": r.baseline,
                    "ratio": r.ratio(),
                    "samples": r.samples,
                })
            })
            .collect();
        out = format!("{}\n", json!({"corpus": id, "pack": pack, "recipes": rows}));
    } else {
        for r in &rows {
            let _ = write!(out, "{}\t{}", r.recipe, r.count);
            if let (Some(b), Some(ratio)) = (r.baseline, r.ratio()) {
                let _ = write!(out, "\t{:.1}% of {b}", ratio * 100.0);
            }
            if !r.samples.is_empty() {
                let _ = write!(out, "\t{}", r.samples.join(" "));
            }
            out.push('\n');
        }
    }
    emit(None, &out)?;
    Ok(ExitCode::SUCCESS)
}

pub fn stats(id: &str, config: Option<&Path>, top: Option<usize>, json: bool) -> Result<ExitCode> {
    let corpus = load(id, config)?;
    let stats = CorpusStats::of(&corpus.corpus);
    let labels = stats.top_labels(top.unwrap_or(usize::MAX));
    let out = if json {
        let labels: Vec<_> = labels.iter().map(|(l, c)| json!({"label": l, "count": c})).collect();
        format!(
            "{}\n",
            json!({"graphs": stats.graphs, "nodes": stats.nodes, "edges": stats.edges, "labels": labels})
        )
    } else {
        let mut out = format!(
            "graphs\t{}\nnodes\t{}\nedges\t{}\n",
            stats.graphs, stats.nodes, stats.edges
        );
        for (l, c) in labels {
            let _ = writeln!(out, "{l}\t{c}");
        }
        out
    };
    emit(None, &out)?;
    Ok(ExitCode::SUCCESS)
}
