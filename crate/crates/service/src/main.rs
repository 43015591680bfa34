use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;
use topicforge_core::workspace::Workspace;
use topicforge_service::{router, ServiceConfig, SessionStore};
use tracing_subscriber::EnvFilter;

/// Serve the topicforge HTTP/JSON API.
#[derive(Debug, Parser)]
#[command(name = "topicforge-server", version)]
struct Args {
    #[arg(long, env = "TOPICFORGE_PORT", default_value_t = 7878)]
    port: u16,
    #[arg(long, env = "TOPICFORGE_BIND", default_value = "127.0.0.1")]
    bind: std::net::IpAddr,
    /// Persist corpora and factorizations in this directory.
    #[arg(long, env = "TOPICFORGE_WORKSPACE")]
    workspace: Option<PathBuf>,
    /// Per-request timeout.
    #[arg(long, env = "TOPICFORGE_TIMEOUT_SECS", default_value_t = 30)]
    timeout_secs: u64,
    /// Allowed CORS origin; any origin when omitted.
    #[arg(long, env = "TOPICFORGE_CORS_ORIGIN")]
    cors_origin: Option<String>,
}

#[tokio::main]
async fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();
    let args = Args::parse();

    let store = match &args.workspace {
        Some(dir) => match SessionStore::with_workspace(Workspace::open(dir)) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                std::process::exit(2);
            }
        },
        None => SessionStore::in_memory(),
    };
    let config = ServiceConfig {
        timeout: Duration::from_secs(args.timeout_secs),
        cors_origin: args.cors_origin,
    };
    let app = router(Arc::new(store), &config);

    let addr = SocketAddr::new(args.bind, args.port);
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind {addr}: {e}");
            std::process::exit(2);
        }
    };
    tracing::info!("listening on http://{addr}");
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    if let Err(e) = axum::serve(listener, app).with_graceful_shutdown(shutdown).await {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
