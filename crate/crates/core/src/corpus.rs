//! Corpus configuration and the loaded registry.
//!
//! ```toml
//! [[corpus]]
//! id = "little-prince"
//! format = "penman"
//! path = "amr/little-prince.txt"
//! language = "en"
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Corpus, LABEL};
use crate::index::FeatureIndex;
use crate::{interchange, penman, sbn, LoadReport};

pub const CONFIG_ENV: &str = "SEMGRAPH_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("duplicate corpus id `{0}`")]
    DuplicateId(String),
    #[error("corpus `{id}`: path {path} does not exist")]
    MissingPath { id: String, path: PathBuf },
    #[error("no config given (use --config or set {CONFIG_ENV})")]
    NoConfig,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unknown corpus `{0}`")]
pub struct UnknownCorpus(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Penman,
    Sbn,
    Interchange,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Penman => "penman",
            Format::Sbn => "sbn",
            Format::Interchange => "interchange",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub id: String,
    pub format: Format,
    pub path: PathBuf,
    #[serde(default)]
    pub language: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    #[serde(default)]
    pub corpus: Vec<CorpusEntry>,
}

impl CorpusConfig {
    /// Parses and validates a config; relative paths are joined to `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg: CorpusConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let mut seen = HashSet::new();
        for entry in &mut cfg.corpus {
            if !seen.insert(entry.id.clone()) {
                return Err(ConfigError::DuplicateId(entry.id.clone()));
            }
            if entry.path.is_relative() {
                entry.path = base.join(&entry.path);
            }
            if !entry.path.exists() {
                return Err(ConfigError::MissingPath {
                    id: entry.id.clone(),
                    path: entry.path.clone(),
                });
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Uses `explicit` if given, else the `SEMGRAPH_CONFIG` variable.
    pub fn locate(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        match explicit {
            Some(p) => Self::from_file(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) => Self::from_file(Path::new(&p)),
                None => Err(ConfigError::NoConfig),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedCorpus {
    pub entry: CorpusEntry,
    pub corpus: Corpus,
    pub index: FeatureIndex,
    pub report: LoadReport,
}

impl LoadedCorpus {
    pub fn new(entry: CorpusEntry, corpus: Corpus, report: LoadReport) -> Self {
        let index = FeatureIndex::build(&corpus);
        Self {
            entry,
            corpus,
            index,
            report,
        }
    }

    /// Loads one corpus; read failures end up in the report, not as errors.
    pub fn load(entry: &CorpusEntry) -> Self {
        let (corpus, report) = read_corpus(entry);
        Self::new(entry.clone(), corpus, report)
    }

    pub fn id(&self) -> &str {
        &self.entry.id
    }
}

fn penman_text(path: &Path) -> std::io::Result<String> {
    if !path.is_dir() {
        return fs::read_to_string(path);
    }
    let mut files: Vec<PathBuf> = walkdir::WalkDir::new(path)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "txt"))
        .map(|e| e.into_path())
        .collect();
    files.sort();
    let mut text = String::new();
    for f in files {
        text.push_str(&fs::read_to_string(f)?);
        text.push_str("\n\n");
    }
    Ok(text)
}

fn read_corpus(entry: &CorpusEntry) -> (Corpus, LoadReport) {
    let failed = |msg: String| {
        let report = LoadReport {
            error: Some(msg),
            ..LoadReport::default()
        };
        (Corpus::new(entry.id.clone()), report)
    };
    match entry.format {
        Format::Penman => match penman_text(&entry.path) {
            Ok(text) => penman::parse_penman_corpus(&entry.id, &text),
            Err(e) => failed(format!("{}: {e}", entry.path.display())),
        },
        Format::Sbn => sbn::parse_sbn_corpus(&entry.id, &entry.path),
        Format::Interchange => match fs::read_to_string(&entry.path) {
            Ok(text) => match interchange::read_corpus(&entry.id, &text) {
                Ok(c) => {
                    let report = LoadReport {
                        loaded: c.len(),
                        ..LoadReport::default()
                    };
                    (c, report)
                }
                Err(e) => failed(e.to_string()),
            },
            Err(e) => failed(format!("{}: {e}", entry.path.display())),
        },
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub graphs: usize,
    pub nodes: usize,
    pub edges: usize,
    /// Edge count per `label` value.
    pub labels: BTreeMap<String, usize>,
}

impl CorpusStats {
    pub fn of(corpus: &Corpus) -> Self {
        let mut stats = CorpusStats {
            graphs: corpus.len(),
            ..Self::default()
        };
        for g in corpus {
            stats.nodes += g.node_count();
            stats.edges += g.edge_count();
            for (_, e) in g.edges() {
                *stats
                    .labels
                    .entry(e.label.get(LABEL).unwrap_or_default().to_owned())
                    .or_insert(0) += 1;
            }
        }
        stats
    }

    /// Labels by descending frequency, ties by label.
    pub fn top_labels(&self, n: usize) -> Vec<(&str, usize)> {
        let mut rows: Vec<_> = self.labels.iter().map(|(k, &v)| (k.as_str(), v)).collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        rows.truncate(n);
        rows
    }
}

/// Loaded corpora in config order. Immutable once built; reloading builds a
/// new registry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    corpora: Vec<LoadedCorpus>,
}

impl Registry {
    pub fn load_all(config: &CorpusConfig) -> Self {
        Self {
            corpora: config.corpus.iter().map(LoadedCorpus::load).collect(),
        }
    }

    pub fn from_corpora(corpora: Vec<LoadedCorpus>) -> Result<Self, ConfigError> {
        let mut seen = HashSet::new();
        for c in &corpora {
            if !seen.insert(c.id().to_owned()) {
                return Err(ConfigError::DuplicateId(c.id().to_owned()));
            }
        }
        Ok(Self { corpora })
    }

    pub fn get(&self, id: &str) -> Result<&LoadedCorpus, UnknownCorpus> {
        self.corpora
            .iter()
            .find(|c| c.id() == id)
            .ok_or_else(|| UnknownCorpus(id.to_owned()))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LoadedCorpus> {
        self.corpora.iter()
    }

    pub fn len(&self) -> usize {
        self.corpora.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corpora.is_empty()
    }

    pub fn corpus_stats(&self, id: &str) -> Result<CorpusStats, UnknownCorpus> {
        Ok(CorpusStats::of(&self.get(id)?.corpus))
    }
}
