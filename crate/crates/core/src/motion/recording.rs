//! `.tpr` recording files.
//!
//! ```text
//! "TPR1\n"
//! <header: one line of JSON>\n
//! <frame packet, 338 bytes>*
//! ```
//!
//! Frame packets use exactly the binary layout of [`crate::wire::encode_frame`],
//! so a recorded session can be replayed onto the wire without re-encoding.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{validate_frame, SkeletonFrame};
use crate::kinematics::{Exercise, Side};
use crate::wire::{self, Role, WireError, FRAME_PACKET_LEN};

pub const MAGIC: &[u8; 4] = b"TPR1";
pub const FORMAT_VERSION: u32 = 1;
pub const FILE_EXTENSION: &str = "tpr";

/// Upper bound on the header line, so corrupt input cannot force huge allocations.
pub const MAX_HEADER_LEN: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Participant {
    pub user_id: u32,
    pub role: Role,
    pub display_name: String,
    /// Surgically treated side, when known. Needed to tag limbs impaired/intact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impaired_side: Option<Side>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Start,
    End,
    Feedback,
}

/// A timestamped annotation: a manual repetition mark or a feedback message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLabel {
    pub timestamp_ms: u64,
    pub kind: LabelKind,
    /// For `Start`/`End`, the user whose stream is marked; for `Feedback`, the author.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_id: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exercise: Option<Exercise>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingHeader {
    pub room_id: String,
    #[serde(default)]
    pub participants: Vec<Participant>,
    #[serde(default)]
    pub exercises: Vec<Exercise>,
    pub capture_rate_hz: f64,
}

impl RecordingHeader {
    pub fn new(room_id: impl Into<String>) -> Self {
        RecordingHeader {
            room_id: room_id.into(),
            participants: Vec::new(),
            exercises: Vec::new(),
            capture_rate_hz: super::DEFAULT_RATE_HZ,
        }
    }

    pub fn participant(&self, user_id: u32) -> Option<&Participant> {
        self.participants.iter().find(|p| p.user_id == user_id)
    }
}

/// A recorded session: header, frames of every user in arrival order, and labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub header: RecordingHeader,
    pub frames: Vec<SkeletonFrame>,
    pub labels: Vec<EventLabel>,
}

/// On-disk form of the header line.
#[derive(Serialize, Deserialize)]
struct HeaderLine {
    format_version: u32,
    #[serde(flatten)]
    header: RecordingHeader,
    #[serde(default)]
    labels: Vec<EventLabel>,
}

#[derive(Debug, Error)]
pub enum RecordingError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic: not a TPR1 recording")]
    BadMagic,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated frame block {index}: {available} of {FRAME_PACKET_LEN} bytes")]
    TruncatedFrame { index: usize, available: usize },
    #[error("frame block {index}: {source}")]
    Frame { index: usize, source: WireError },
    #[error("invalid frame {index}: {detail}")]
    InvalidFrame { index: usize, detail: String },
    #[error("out-of-order timestamp for user {user_id} at frame {index}")]
    OutOfOrder { user_id: u32, index: usize },
    #[error("label {index} at {timestamp_ms} ms lies outside the frame time range")]
    LabelOutOfRange { index: usize, timestamp_ms: u64 },
}

impl Recording {
    pub fn new(header: RecordingHeader) -> Self {
        Recording {
            header,
            frames: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// User ids in order of first appearance in the frame stream.
    pub fn user_ids(&self) -> Vec<u32> {
        let mut ids = Vec::new();
        for f in &self.frames {
            if !ids.contains(&f.user_id) {
                ids.push(f.user_id);
            }
        }
        ids
    }

    /// The time-ordered frames of one user.
    pub fn frames_for(&self, user_id: u32) -> Vec<SkeletonFrame> {
        self.frames
            .iter()
            .filter(|f| f.user_id == user_id)
            .cloned()
            .collect()
    }

    /// First and last timestamp, optionally restricted to one user.
    pub fn time_range(&self, user_id: Option<u32>) -> Option<(u64, u64)> {
        let mut range: Option<(u64, u64)> = None;
        for f in self
            .frames
            .iter()
            .filter(|f| user_id.is_none_or(|u| u == f.user_id))
        {
            range = Some(match range {
                None => (f.timestamp_ms, f.timestamp_ms),
                Some((lo, hi)) => (lo.min(f.timestamp_ms), hi.max(f.timestamp_ms)),
            });
        }
        range
    }

    /// Checks frame validity, per-user ordering and label placement.
    pub fn validate(&self) -> Result<(), RecordingError> {
        let mut last: HashMap<u32, u64> = HashMap::new();
        for (index, frame) in self.frames.iter().enumerate() {
            if let Err(v) = validate_frame(frame) {
                return Err(RecordingError::InvalidFrame {
                    index,
                    detail: v[0].to_string(),
                });
            }
            if let Some(prev) = last.insert(frame.user_id, frame.timestamp_ms) {
                if frame.timestamp_ms <= prev {
                    return Err(RecordingError::OutOfOrder {
                        user_id: frame.user_id,
                        index,
                    });
                }
            }
        }
        for (index, label) in self.labels.iter().enumerate() {
            // Feedback is authored by `user_id`; rep labels apply to that user's stream.
            let scope = match label.kind {
                LabelKind::Feedback => None,
                LabelKind::Start | LabelKind::End => label.user_id,
            };
            let in_range = self
                .time_range(scope)
                .is_some_and(|(lo, hi)| (lo..=hi).contains(&label.timestamp_ms));
            if !in_range {
                return Err(RecordingError::LabelOutOfRange {
                    index,
                    timestamp_ms: label.timestamp_ms,
                });
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Recording, RecordingError> {
        let bytes = fs::read(path)?;
        parse_recording(&bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RecordingError> {
        let mut file = io::BufWriter::new(fs::File::create(path)?);
        write_recording(self, &mut file)?;
        file.flush()?;
        Ok(())
    }
}

/// Serialises a recording after validating it.
pub fn write_recording<W: Write>(rec: &Recording, mut sink: W) -> Result<(), RecordingError> {
    rec.validate()?;
    let line = HeaderLine {
        format_version: FORMAT_VERSION,
        header: rec.header.clone(),
        labels: rec.labels.clone(),
    };
    let json =
        serde_json::to_string(&line).map_err(|e| RecordingError::MalformedHeader(e.to_string()))?;
    sink.write_all(MAGIC)?;
    sink.write_all(b"\n")?;
    sink.write_all(json.as_bytes())?;
    sink.write_all(b"\n")?;
    for (index, frame) in rec.frames.iter().enumerate() {
        let packet =
            wire::encode_frame(frame).map_err(|source| RecordingError::Frame { index, source })?;
        sink.write_all(packet.as_bytes())?;
    }
    Ok(())
}

pub fn read_recording<R: Read>(mut source: R) -> Result<Recording, RecordingError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    parse_recording(&bytes)
}

/// Parses a complete `.tpr` image held in memory.
pub fn parse_recording(bytes: &[u8]) -> Result<Recording, RecordingError> {
    let rest = bytes
        .strip_prefix(MAGIC.as_slice())
        .and_then(|r| r.strip_prefix(b"\n"))
        .ok_or(RecordingError::BadMagic)?;
    let newline = rest
        .iter()
        .take(MAX_HEADER_LEN + 1)
        .position(|&b| b == b'\n')
        .ok_or_else(|| RecordingError::MalformedHeader("unterminated header line".into()))?;
    let line: HeaderLine = serde_json::from_slice(&rest[..newline])
        .map_err(|e| RecordingError::MalformedHeader(e.to_string()))?;
    if line.format_version != FORMAT_VERSION {
        return Err(RecordingError::UnsupportedVersion(line.format_version));
    }

    let body = &rest[newline + 1..];
    let mut frames = Vec::with_capacity(body.len() / FRAME_PACKET_LEN);
    for (index, block) in body.chunks(FRAME_PACKET_LEN).enumerate() {
        if block.len() != FRAME_PACKET_LEN {
            return Err(RecordingError::TruncatedFrame {
                index,
                available: block.len(),
            });
        }
        let frame =
            wire::decode_frame(block).map_err(|source| RecordingError::Frame { index, source })?;
        frames.push(frame);
    }

    let rec = Recording {
        header: line.header,
        frames,
        labels: line.labels,
    };
    rec.validate()?;
    Ok(rec)
}
