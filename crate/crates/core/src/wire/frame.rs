use super::WireError;
use crate::motion::{validate_frame, Confidence, Joint, SkeletonFrame, JOINT_COUNT};

pub const FRAME_TAG: u8 = 0x01;
/// Bytes per joint record: three f32 coordinates and one confidence byte.
pub const JOINT_RECORD_LEN: usize = 13;
pub const FRAME_HEADER_LEN: usize = 13;
pub const FRAME_PACKET_LEN: usize = FRAME_HEADER_LEN + JOINT_COUNT * JOINT_RECORD_LEN;

/// One encoded skeleton frame, exactly [`FRAME_PACKET_LEN`] bytes.
#[derive(Clone, PartialEq, Eq)]
pub struct FramePacket([u8; FRAME_PACKET_LEN]);

impl FramePacket {
    #[inline]
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0.to_vec()
    }

    pub fn timestamp_ms(&self) -> u64 {
        u64::from_le_bytes(self.0[1..9].try_into().unwrap())
    }

    pub fn user_id(&self) -> u32 {
        u32::from_le_bytes(self.0[9..13].try_into().unwrap())
    }
}

impl AsRef<[u8]> for FramePacket {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl std::fmt::Debug for FramePacket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FramePacket")
            .field("user_id", &self.user_id())
            .field("timestamp_ms", &self.timestamp_ms())
            .finish_non_exhaustive()
    }
}

/// Encodes a frame into its fixed 338-byte little-endian layout.
///
/// ```text
/// offset  size  field
///      0     1  tag 0x01
///      1     8  timestamp_ms (u64 LE)
///      9     4  user_id (u32 LE)
///     13   325  25 × { x f32 LE, y f32 LE, z f32 LE, confidence u8 } in JointId order
/// ```
pub fn encode_frame(frame: &SkeletonFrame) -> Result<FramePacket, WireError> {
    if let Err(violations) = validate_frame(frame) {
        return Err(WireError::InvalidFrame(violations[0].to_string()));
    }
    let mut buf = [0u8; FRAME_PACKET_LEN];
    buf[0] = FRAME_TAG;
    buf[1..9].copy_from_slice(&frame.timestamp_ms.to_le_bytes());
    buf[9..13].copy_from_slice(&frame.user_id.to_le_bytes());
    for (i, joint) in frame.joints.iter().enumerate() {
        let base = FRAME_HEADER_LEN + i * JOINT_RECORD_LEN;
        for (axis, c) in joint.position.iter().enumerate() {
            buf[base + 4 * axis..base + 4 * axis + 4].copy_from_slice(&c.to_le_bytes());
        }
        buf[base + 12] = joint.confidence.as_byte();
    }
    Ok(FramePacket(buf))
}

/// Decodes a frame packet. Never panics on arbitrary input.
pub fn decode_frame(bytes: &[u8]) -> Result<SkeletonFrame, WireError> {
    if bytes.len() != FRAME_PACKET_LEN {
        return Err(WireError::WrongLength(bytes.len()));
    }
    if bytes[0] != FRAME_TAG {
        return Err(WireError::UnexpectedTag(bytes[0]));
    }
    let timestamp_ms = u64::from_le_bytes(bytes[1..9].try_into().unwrap());
    let user_id = u32::from_le_bytes(bytes[9..13].try_into().unwrap());
    let mut joints = Vec::with_capacity(JOINT_COUNT);
    for (joint, record) in bytes[FRAME_HEADER_LEN..]
        .chunks_exact(JOINT_RECORD_LEN)
        .enumerate()
    {
        let mut position = [0f32; 3];
        for (axis, p) in position.iter_mut().enumerate() {
            *p = f32::from_le_bytes(record[4 * axis..4 * axis + 4].try_into().unwrap());
            if !p.is_finite() {
                return Err(WireError::NonFinite { joint, axis });
            }
        }
        let confidence = Confidence::from_byte(record[12]).ok_or(WireError::BadConfidence {
            joint,
            value: record[12],
        })?;
        joints.push(Joint::new(position, confidence));
    }
    Ok(SkeletonFrame {
        user_id,
        timestamp_ms,
        joints,
    })
}
