//! Async WebSocket client for the hub, used by the simulator, replay tool and tests.

use std::time::{SystemTime, UNIX_EPOCH};

use bytes::Bytes;
use futures_util::stream::{SplitSink, SplitStream};
use futures_util::{SinkExt, StreamExt};
use telephyt_core::motion::{Recording, SkeletonFrame};
use telephyt_core::synth::{replay_schedule, SynthError};
use telephyt_core::wire::{
    decode_control, decode_frame, encode_control, encode_frame, ControlError, ControlMessage, ErrorCode, PeerInfo,
    Role, WireError, WS_PATH,
};
use thiserror::Error;
use tokio::net::TcpStream;
use tokio::time::Instant;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

type Socket = WebSocketStream<MaybeTlsStream<TcpStream>>;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("connection failed: {0}")]
    Socket(#[from] tokio_tungstenite::tungstenite::Error),
    #[error("hub rejected request: {detail} ({code:?})")]
    Rejected { code: ErrorCode, detail: String },
    #[error("unexpected message from hub: {0}")]
    Protocol(String),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("connection closed")]
    Closed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    /// A relayed frame with its exact bytes.
    Frame { packet: Bytes, frame: SkeletonFrame },
    Control(ControlMessage),
}

/// `ws://host:port` gains the default `/ws` path.
pub fn session_url(url: &str) -> String {
    let rest = url.split_once("://").map_or(url, |(_, r)| r);
    if rest.contains('/') && !rest.ends_with('/') {
        url.to_string()
    } else {
        format!("{}{}", url.trim_end_matches('/'), WS_PATH)
    }
}

pub fn unix_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

pub struct ClientSender {
    sink: SplitSink<Socket, Message>,
    user_id: u32,
}

pub struct ClientReceiver {
    stream: SplitStream<Socket>,
}

/// A joined hub connection.
pub struct HubClient {
    pub user_id: u32,
    pub peers: Vec<PeerInfo>,
    sender: ClientSender,
    receiver: ClientReceiver,
}

impl HubClient {
    /// Connects and joins `room_id`; fails with [`ClientError::Rejected`] if the hub refuses.
    pub async fn join(url: &str, room_id: &str, role: Role, display_name: &str) -> Result<HubClient, ClientError> {
        let (socket, _) = tokio_tungstenite::connect_async(session_url(url)).await?;
        let (sink, stream) = socket.split();
        let mut sender = ClientSender { sink, user_id: 0 };
        let mut receiver = ClientReceiver { stream };
        sender
            .send_control(&ControlMessage::Join {
                room_id: room_id.to_string(),
                role,
                display_name: display_name.to_string(),
            })
            .await?;
        loop {
            match receiver.next_event().await? {
                Event::Control(ControlMessage::JoinAck { user_id, peers }) => {
                    sender.user_id = user_id;
                    return Ok(HubClient { user_id, peers, sender, receiver });
                }
                Event::Control(ControlMessage::Error { code, detail }) => {
                    return Err(ClientError::Rejected { code, detail })
                }
                other => return Err(ClientError::Protocol(format!("{other:?}"))),
            }
        }
    }

    pub async fn send_frame(&mut self, frame: &SkeletonFrame) -> Result<(), ClientError> {
        self.sender.send_frame(frame).await
    }

    pub async fn send_control(&mut self, msg: &ControlMessage) -> Result<(), ClientError> {
        self.sender.send_control(msg).await
    }

    pub async fn next_event(&mut self) -> Result<Event, ClientError> {
        self.receiver.next_event().await
    }

    pub fn split(self) -> (ClientSender, ClientReceiver) {
        (self.sender, self.receiver)
    }
}

impl ClientSender {
    pub fn user_id(&self) -> u32 {
        self.user_id
    }

    /// Sends `frame` under this connection's assigned user id.
    pub async fn send_frame(&mut self, frame: &SkeletonFrame) -> Result<(), ClientError> {
        let mut frame = frame.clone();
        frame.user_id = self.user_id;
        let packet = encode_frame(&frame)?;
        self.sink.send(Message::Binary(Bytes::from(packet.into_vec()))).await?;
        Ok(())
    }

    pub async fn send_control(&mut self, msg: &ControlMessage) -> Result<(), ClientError> {
        self.sink.send(Message::Text(encode_control(msg).into())).await?;
        Ok(())
    }

    pub async fn close(mut self) -> Result<(), ClientError> {
        self.sink.close().await?;
        Ok(())
    }

    /// Streams one user's frames in real time (scaled by `speed`), with
    /// timestamps rebased to the wall clock. Returns the number sent.
    pub async fn stream_recording(&mut self, rec: &Recording, speed: f64) -> Result<usize, ClientError> {
        let schedule = replay_schedule(rec, speed, unix_millis())?;
        let start = Instant::now();
        for item in &schedule {
            tokio::time::sleep_until(start + item.at).await;
            self.send_frame(&item.frame).await?;
        }
        Ok(schedule.len())
    }
}

impl ClientReceiver {
    pub async fn next_event(&mut self) -> Result<Event, ClientError> {
        loop {
            match self.stream.next().await {
                None => return Err(ClientError::Closed),
                Some(Err(e)) => return Err(e.into()),
                Some(Ok(Message::Binary(packet))) => {
                    let frame = decode_frame(&packet)?;
                    return Ok(Event::Frame { packet, frame });
                }
                Some(Ok(Message::Text(text))) => return Ok(Event::Control(decode_control(text.as_str())?)),
                Some(Ok(Message::Close(_))) => return Err(ClientError::Closed),
                Some(Ok(_)) => {}
            }
        }
    }
}
