use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;

use semgraph_core::corpus::{CorpusConfig, Registry};
use semgraph_service::{router, ServiceConfig, SharedRegistry};

/// Serve corpora and the matcher over HTTP.
#[derive(Parser)]
#[command(name = "semgraph-server", version)]
struct Args {
    /// Corpus configuration file.
    #[arg(long, env = "SEMGRAPH_CONFIG")]
    config: PathBuf,
    /// Address to listen on.
    #[arg(long, env = "SEMGRAPH_LISTEN", default_value = "127.0.0.1:8080")]
    listen: String,
    /// Per-request match budget in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    budget_ms: u64,
    /// Do not send cross-origin headers.
    #[arg(long)]
    no_cors: bool,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let config = match CorpusConfig::from_file(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("semgraph-server: {e}");
            return ExitCode::from(1);
        }
    };
    let registry = Registry::load_all(&config);
    for c in registry.iter() {
        eprintln!("loaded {}: {} graphs", c.id(), c.corpus.len());
        if let Some(err) = &c.report.error {
            eprintln!("  error: {err}");
        }
        if !c.report.skipped.is_empty() {
            eprintln!("  skipped {} sentences", c.report.skipped.len());
        }
    }
    let app = router(
        SharedRegistry::new(registry),
        ServiceConfig {
            budget: Duration::from_millis(args.budget_ms),
            cors: !args.no_cors,
        },
    );
    let listener = match tokio::net::TcpListener::bind(&args.listen).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("semgraph-server: cannot listen on {}: {e}", args.listen);
            return ExitCode::from(1);
        }
    };
    eprintln!("listening on {}", args.listen);
    if let Err(e) = axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
    {
        eprintln!("semgraph-server: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
