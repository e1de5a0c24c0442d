//! The persona-probe service: questionnaire administration, experiment
//! orchestration, metrics and statistics over HTTP/JSON.

mod routes;
mod state;

pub use state::{AppState, EndpointsFile};

use std::net::SocketAddr;

use axum::Router;

/// Builds the full application router.
pub fn app(state: AppState) -> Router {
    routes::router(state)
}

/// Binds and serves until the process ends. Returns the bound address
/// through the callback before blocking, so callers can bind port 0.
pub async fn serve(
    state: AppState,
    addr: SocketAddr,
    on_bound: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, app(state)).await
}

/// Spawns the service on an ephemeral loopback port and returns its base
/// URL; used by the CLI's embedded mode and by tests.
pub async fn spawn_ephemeral(state: AppState) -> std::io::Result<String> {
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], 0))).await?;
    let addr = listener.local_addr()?;
    tokio::spawn(async move {
        if let Err(e) = axum::serve(listener, app(state)).await {
            tracing::error!("server stopped: {e}");
        }
    });
    Ok(format!("http://{addr}"))
}
