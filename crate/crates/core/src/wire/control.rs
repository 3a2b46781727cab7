use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ControlError;
use crate::kinematics::{Exercise, Side};

pub const MAX_ROOM_ID_CHARS: usize = 64;
pub const MAX_DISPLAY_NAME_CHARS: usize = 64;
pub const MAX_FEEDBACK_CHARS: usize = 512;
/// Control payloads larger than this are rejected before parsing.
pub const MAX_CONTROL_LEN: usize = 16 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Patient,
    Therapist,
    /// Receive-only participant; never originates skeleton frames.
    Observer,
}

impl Role {
    pub fn may_send_frames(self) -> bool {
        self != Role::Observer
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Patient => "patient",
            Role::Therapist => "therapist",
            Role::Observer => "observer",
        })
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "patient" => Ok(Role::Patient),
            "therapist" => Ok(Role::Therapist),
            "observer" => Ok(Role::Observer),
            other => Err(format!("unknown role '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeerInfo {
    pub user_id: u32,
    pub role: Role,
    pub display_name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    RoleOccupied,
    Capacity,
    ReceiveOnly,
    NotJoined,
    AlreadyJoined,
    InProgress,
    NotRecording,
    BadMessage,
    Internal,
}

impl ErrorCode {
    pub fn default_detail(self) -> &'static str {
        match self {
            ErrorCode::RoleOccupied => "role occupied",
            ErrorCode::Capacity => "capacity",
            ErrorCode::ReceiveOnly => "observers are receive-only",
            ErrorCode::NotJoined => "not joined",
            ErrorCode::AlreadyJoined => "already joined",
            ErrorCode::InProgress => "in progress",
            ErrorCode::NotRecording => "not recording",
            ErrorCode::BadMessage => "bad message",
            ErrorCode::Internal => "internal error",
        }
    }
}

/// Session control messages, carried as JSON text with a `"type"` discriminator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControlMessage {
    Join {
        room_id: String,
        role: Role,
        display_name: String,
    },
    JoinAck {
        user_id: u32,
        peers: Vec<PeerInfo>,
    },
    /// Sent to existing members when someone joins their room.
    PeerJoined {
        user_id: u32,
        role: Role,
        display_name: String,
    },
    Feedback {
        from: u32,
        text: String,
    },
    MetricUpdate {
        #[serde(default)]
        user_id: u32,
        exercise: Exercise,
        side: Side,
        rep_count: u32,
        last_peak_deg: f64,
        last_velocity_dps: f64,
    },
    Leave {
        user_id: u32,
    },
    Error {
        code: ErrorCode,
        detail: String,
    },
    StartRecording,
    StopRecording,
    RecordingStatus {
        active: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<String>,
    },
}

const KNOWN_TYPES: &[&str] = &[
    "join",
    "join_ack",
    "peer_joined",
    "feedback",
    "metric_update",
    "leave",
    "error",
    "start_recording",
    "stop_recording",
    "recording_status",
];

impl ControlMessage {
    pub fn error(code: ErrorCode) -> Self {
        ControlMessage::Error {
            code,
            detail: code.default_detail().to_string(),
        }
    }

    /// The `"type"` discriminator of this message.
    pub fn type_name(&self) -> &'static str {
        match self {
            ControlMessage::Join { .. } => "join",
            ControlMessage::JoinAck { .. } => "join_ack",
            ControlMessage::PeerJoined { .. } => "peer_joined",
            ControlMessage::Feedback { .. } => "feedback",
            ControlMessage::MetricUpdate { .. } => "metric_update",
            ControlMessage::Leave { .. } => "leave",
            ControlMessage::Error { .. } => "error",
            ControlMessage::StartRecording => "start_recording",
            ControlMessage::StopRecording => "stop_recording",
            ControlMessage::RecordingStatus { .. } => "recording_status",
        }
    }

    /// Checks the field-level invariants of the message.
    pub fn validate(&self) -> Result<(), ControlError> {
        match self {
            ControlMessage::Join {
                room_id,
                display_name,
                ..
            } => {
                validate_room_id(room_id)?;
                if display_name.chars().count() > MAX_DISPLAY_NAME_CHARS {
                    return Err(ControlError::Invalid(format!(
                        "display_name longer than {MAX_DISPLAY_NAME_CHARS} characters"
                    )));
                }
            }
            ControlMessage::Feedback { text, .. } => {
                if text.chars().count() > MAX_FEEDBACK_CHARS {
                    return Err(ControlError::Invalid(format!(
                        "feedback text longer than {MAX_FEEDBACK_CHARS} characters"
                    )));
                }
            }
            ControlMessage::MetricUpdate {
                last_peak_deg,
                last_velocity_dps,
                ..
            } => {
                if !last_peak_deg.is_finite() || !last_velocity_dps.is_finite() {
                    return Err(ControlError::Invalid("non-finite metric".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

pub fn validate_room_id(room_id: &str) -> Result<(), ControlError> {
    let n = room_id.chars().count();
    if n == 0 || n > MAX_ROOM_ID_CHARS {
        return Err(ControlError::Invalid(format!(
            "room_id must be 1..={MAX_ROOM_ID_CHARS} characters"
        )));
    }
    Ok(())
}

pub fn encode_control(msg: &ControlMessage) -> String {
    serde_json::to_string(msg).expect("control messages always serialise")
}

pub fn decode_control(text: &str) -> Result<ControlMessage, ControlError> {
    if text.len() > MAX_CONTROL_LEN {
        return Err(ControlError::TooLarge(text.len()));
    }
    let value: Value =
        serde_json::from_str(text).map_err(|e| ControlError::Malformed(e.to_string()))?;
    let kind = match value.get("type") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(ControlError::Invalid("\"type\" must be a string".into())),
        None if value.is_object() => return Err(ControlError::MissingField("type".into())),
        None => return Err(ControlError::Malformed("expected a JSON object".into())),
    };
    if !KNOWN_TYPES.contains(&kind.as_str()) {
        return Err(ControlError::UnknownType(kind));
    }
    let msg: ControlMessage = serde_json::from_value(value).map_err(|e| {
        let text = e.to_string();
        match text
            .strip_prefix("missing field `")
            .and_then(|r| r.split('`').next())
        {
            Some(field) => ControlError::MissingField(field.to_string()),
            None => ControlError::Invalid(text),
        }
    })?;
    msg.validate()?;
    Ok(msg)
}
