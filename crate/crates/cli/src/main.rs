use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

/// Convert, search and lint semantic graph corpora.
#[derive(Parser)]
#[command(name = "semgraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum InputFormat {
    Penman,
    Sbn,
    Interchange,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OutputFormat {
    Interchange,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Pack {
    Amr,
    Pmb,
}

impl Pack {
    fn name(self) -> &'static str {
        match self {
            Pack::Amr => "amr",
            Pack::Pmb => "pmb",
        }
    }
}

#[derive(clap::Args)]
struct CorpusArgs {
    /// Corpus id from the configuration.
    #[arg(long)]
    corpus: String,
    /// Corpus configuration file (defaults to $SEMGRAPH_CONFIG).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Convert graphs between formats.
    Convert {
        /// Input file or directory (SBN corpus layout), `-` for stdin.
        input: String,
        #[arg(long, value_enum)]
        from: InputFormat,
        #[arg(long, value_enum)]
        to: OutputFormat,
        /// Write here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a request over a corpus.
    Grep {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Request text.
        #[arg(long, conflicts_with = "request_file", required_unless_present = "request_file")]
        request: Option<String>,
        /// File holding the request.
        #[arg(long)]
        request_file: Option<PathBuf>,
        /// Clustering key: `N.feature`, `e.label` or `whether { ... }`.
        #[arg(long)]
        cluster: Option<String>,
        /// Print only the number of occurrences.
        #[arg(long)]
        count: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run an error-mining recipe pack; always exits 0.
    Lint {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_enum)]
        pack: Pack,
        #[arg(long)]
        json: bool,
    },
    /// Graph, node and edge totals with the edge-label histogram.
    Stats {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Show only the most frequent labels.
        #[arg(long)]
        top: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Convert {
            input,
            from,
            to,
            output,
        } => commands::convert(&input, from, to, output.as_deref()),
        Command::Grep {
            corpus,
            request,
            request_file,
            cluster,
            count,
            json,
        } => commands::grep(
            &corpus.corpus,
            corpus.config.as_deref(),
            commands::RequestSource::new(request, request_file),
            cluster.as_deref(),
            count,
            json,
        ),
        Command::Lint { corpus, pack, json } => {
            commands::lint(&corpus.corpus, corpus.config.as_deref(), pack.name(), json)
        }
        Command::Stats { corpus, top, json } => {
            commands::stats(&corpus.corpus, corpus.config.as_deref(), top, json)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("semgraph: {e}");
            ExitCode::from(1)
        }
    }
}
