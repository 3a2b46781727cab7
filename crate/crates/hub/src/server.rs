//! HTTP and WebSocket front end.

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::Ordering;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures_util::{SinkExt, StreamExt};
use serde::Serialize;
use telephyt_core::wire::WS_PATH;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;
use tracing::{debug, info, warn};

use crate::hub::{Hub, RecordingCommandError, RoomSummary};
use crate::outbox::Outgoing;
use crate::HubError;

pub fn router(hub: Arc<Hub>) -> Router {
    let mut app = Router::new()
        .route(WS_PATH, get(ws_upgrade))
        .route("/healthz", get(|| async { "ok" }))
        .route("/rooms", get(list_rooms))
        .route("/rooms/{room}/recording/start", post(start_recording))
        .route("/rooms/{room}/recording/stop", post(stop_recording));
    if let Some(dir) = hub.config().static_dir.clone() {
        app = app.fallback_service(ServeDir::new(dir));
    }
    app.with_state(hub)
}

#[derive(Serialize)]
struct RoomsResponse {
    rooms: Vec<RoomSummary>,
    frames_relayed: u64,
    frames_rate_limited: u64,
    frames_rejected: u64,
}

async fn list_rooms(State(hub): State<Arc<Hub>>) -> Json<RoomsResponse> {
    let c = &hub.counters;
    Json(RoomsResponse {
        rooms: hub.rooms(),
        frames_relayed: c.frames_relayed.load(Ordering::Relaxed),
        frames_rate_limited: c.frames_rate_limited.load(Ordering::Relaxed),
        frames_rejected: c.frames_rejected.load(Ordering::Relaxed),
    })
}

fn command_error(e: RecordingCommandError) -> Response {
    let status = match e {
        RecordingCommandError::UnknownRoom(_) => StatusCode::NOT_FOUND,
        RecordingCommandError::InProgress | RecordingCommandError::NotRecording => StatusCode::CONFLICT,
        RecordingCommandError::Write(_) => StatusCode::INTERNAL_SERVER_ERROR,
    };
    (status, Json(serde_json::json!({ "error": e.code(), "detail": e.to_string() }))).into_response()
}

async fn start_recording(State(hub): State<Arc<Hub>>, Path(room): Path<String>) -> Response {
    match hub.start_recording(&room) {
        Ok(()) => Json(serde_json::json!({ "room_id": room, "recording": true })).into_response(),
        Err(e) => command_error(e),
    }
}

async fn stop_recording(State(hub): State<Arc<Hub>>, Path(room): Path<String>) -> Response {
    let result = tokio::task::spawn_blocking(move || hub.stop_recording(&room).map(|p| (room, p))).await;
    match result.expect("recording writer panicked") {
        Ok((room, path)) => {
            Json(serde_json::json!({ "room_id": room, "recording": false, "path": path })).into_response()
        }
        Err(e) => command_error(e),
    }
}

async fn ws_upgrade(State(hub): State<Arc<Hub>>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| serve_socket(hub, socket))
}

async fn serve_socket(hub: Arc<Hub>, socket: WebSocket) {
    let mut session = hub.connect();
    let outbox = session.outbox();
    let (mut tx, mut rx) = socket.split();
    let writer = tokio::spawn(async move {
        while let Some(item) = outbox.next().await {
            let msg = match item {
                Outgoing::Text(t) => Message::Text(t.into()),
                Outgoing::Binary(b) => Message::Binary(b),
            };
            if tx.send(msg).await.is_err() {
                break;
            }
        }
        let _ = tx.close().await;
    });
    while let Some(msg) = rx.next().await {
        match msg {
            Ok(Message::Text(t)) => session.handle_text(t.as_str()),
            Ok(Message::Binary(b)) => session.handle_binary(b),
            Ok(Message::Close(_)) => break,
            Ok(_) => {}
            Err(e) => {
                debug!(error = %e, "socket error");
                break;
            }
        }
    }
    // Dropping the session leaves the room and closes the outbox.
    drop(session);
    let _ = writer.await;
}

/// A bound, not yet running server.
pub struct Server {
    hub: Arc<Hub>,
    listener: TcpListener,
}

impl Server {
    /// Binds the configured address; fails if it is in use.
    pub async fn bind(hub: Arc<Hub>) -> Result<Server, HubError> {
        let addr = hub.config().listen;
        let listener = TcpListener::bind(addr)
            .await
            .map_err(|e| HubError::Bind { addr, source: e })?;
        Ok(Server { hub, listener })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener.local_addr().expect("bound listener")
    }

    pub fn hub(&self) -> Arc<Hub> {
        self.hub.clone()
    }

    /// Serves until `shutdown` resolves, then finalises open recordings.
    pub async fn run(self, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<Vec<PathBuf>, HubError> {
        let hub = self.hub.clone();
        info!(addr = %self.local_addr(), "hub listening");
        let sweeper = {
            let hub = hub.clone();
            let period = (hub.config().idle_timeout / 4).clamp(Duration::from_millis(50), Duration::from_secs(5));
            tokio::spawn(async move {
                let mut tick = tokio::time::interval(period);
                loop {
                    tick.tick().await;
                    hub.sweep(Instant::now());
                }
            })
        };
        let (stop_tx, stop_rx) = tokio::sync::oneshot::channel::<()>();
        let serve_hub = hub.clone();
        let served = axum::serve(self.listener, router(serve_hub)).with_graceful_shutdown(async move {
            shutdown.await;
            let _ = stop_tx.send(());
        });
        // Open sockets keep graceful shutdown waiting, so disconnect members
        // as soon as shutdown is requested.
        let closer = {
            let hub = hub.clone();
            tokio::spawn(async move {
                if stop_rx.await.is_ok() {
                    hub.shutdown()
                } else {
                    Vec::new()
                }
            })
        };
        let result = served.await;
        sweeper.abort();
        let mut written = closer.await.unwrap_or_default();
        written.extend(hub.shutdown());
        if let Err(e) = result {
            warn!(error = %e, "server error");
            return Err(HubError::Io(e));
        }
        info!(recordings = written.len(), "hub stopped");
        Ok(written)
    }
}
