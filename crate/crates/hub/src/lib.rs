//! Multi-room relay for live skeleton streams.
//!
//! Participants join a room over `/ws` as patient, therapist or observer.
//! Frames and feedback are forwarded to the other members in per-sender
//! order; a room's traffic can be recorded server-side to a `.tpr` file.

pub mod client;
mod config;
mod hub;
mod outbox;
mod server;

use std::net::SocketAddr;

use thiserror::Error;

pub use config::{
    HubConfig, DEFAULT_IDLE_TIMEOUT, DEFAULT_LISTEN, DEFAULT_MAX_RATE_HZ, DEFAULT_MAX_ROOMS, DEFAULT_QUEUE_DEPTH,
};
pub use hub::{Counters, Hub, RecordingCommandError, RoomSummary, Session};
pub use outbox::{Outbox, Outgoing};
pub use server::{router, Server};

#[derive(Debug, Error)]
pub enum HubError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Recording(#[from] telephyt_core::motion::RecordingError),
}
