//! Session wire protocol.
//!
//! Binary socket messages are fixed-size [`FramePacket`]s; text messages are
//! JSON [`ControlMessage`]s. At 30 Hz one skeleton stream costs
//! 338 × 30 = 10,140 bytes/s (≈ 81 kbit/s).

mod control;
mod frame;

use thiserror::Error;

pub use control::{
    decode_control, encode_control, validate_room_id, ControlMessage, ErrorCode, PeerInfo, Role,
    MAX_CONTROL_LEN, MAX_DISPLAY_NAME_CHARS, MAX_FEEDBACK_CHARS, MAX_ROOM_ID_CHARS,
};
pub use frame::{
    decode_frame, encode_frame, FramePacket, FRAME_HEADER_LEN, FRAME_PACKET_LEN, FRAME_TAG,
    JOINT_RECORD_LEN,
};

/// Endpoint path of the session socket.
pub const WS_PATH: &str = "/ws";

/// Bytes per second for one frame stream at `rate_hz`.
pub fn stream_bytes_per_second(rate_hz: f64) -> f64 {
    FRAME_PACKET_LEN as f64 * rate_hz
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("wrong length: expected {FRAME_PACKET_LEN} bytes, got {0}")]
    WrongLength(usize),
    #[error("unexpected tag 0x{0:02x}")]
    UnexpectedTag(u8),
    #[error("non-finite float at joint {joint} axis {axis}")]
    NonFinite { joint: usize, axis: usize },
    #[error("confidence byte {value} > 2 at joint {joint}")]
    BadConfidence { joint: usize, value: u8 },
    #[error("cannot encode invalid frame: {0}")]
    InvalidFrame(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControlError {
    #[error("malformed control message: {0}")]
    Malformed(String),
    #[error("unknown type \"{0}\"")]
    UnknownType(String),
    #[error("missing required field \"{0}\"")]
    MissingField(String),
    #[error("invalid control message: {0}")]
    Invalid(String),
    #[error("control message too large: {0} bytes")]
    TooLarge(usize),
}
