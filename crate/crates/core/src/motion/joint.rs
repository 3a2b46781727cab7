use std::fmt;

use serde::{Deserialize, Serialize};

/// Number of joints in a tracked skeleton.
pub const JOINT_COUNT: usize = 25;

/// Joints beyond this distance from the camera origin are rejected.
pub const MAX_JOINT_DISTANCE_M: f32 = 10.0;

/// The 25 joints of a depth-camera body skeleton.
///
/// Ordinals are part of the wire and file layout and must never be reordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum JointId {
    SpineBase = 0,
    SpineMid = 1,
    SpineShoulder = 2,
    Neck = 3,
    Head = 4,
    ShoulderL = 5,
    ShoulderR = 6,
    ElbowL = 7,
    ElbowR = 8,
    WristL = 9,
    WristR = 10,
    HandL = 11,
    HandR = 12,
    HandTipL = 13,
    HandTipR = 14,
    ThumbL = 15,
    ThumbR = 16,
    HipL = 17,
    HipR = 18,
    KneeL = 19,
    KneeR = 20,
    AnkleL = 21,
    AnkleR = 22,
    FootL = 23,
    FootR = 24,
}

impl JointId {
    pub const ALL: [JointId; JOINT_COUNT] = [
        JointId::SpineBase,
        JointId::SpineMid,
        JointId::SpineShoulder,
        JointId::Neck,
        JointId::Head,
        JointId::ShoulderL,
        JointId::ShoulderR,
        JointId::ElbowL,
        JointId::ElbowR,
        JointId::WristL,
        JointId::WristR,
        JointId::HandL,
        JointId::HandR,
        JointId::HandTipL,
        JointId::HandTipR,
        JointId::ThumbL,
        JointId::ThumbR,
        JointId::HipL,
        JointId::HipR,
        JointId::KneeL,
        JointId::KneeR,
        JointId::AnkleL,
        JointId::AnkleR,
        JointId::FootL,
        JointId::FootR,
    ];

    #[inline]
    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(ordinal: usize) -> Option<JointId> {
        Self::ALL.get(ordinal).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            JointId::SpineBase => "SpineBase",
            JointId::SpineMid => "SpineMid",
            JointId::SpineShoulder => "SpineShoulder",
            JointId::Neck => "Neck",
            JointId::Head => "Head",
            JointId::ShoulderL => "ShoulderL",
            JointId::ShoulderR => "ShoulderR",
            JointId::ElbowL => "ElbowL",
            JointId::ElbowR => "ElbowR",
            JointId::WristL => "WristL",
            JointId::WristR => "WristR",
            JointId::HandL => "HandL",
            JointId::HandR => "HandR",
            JointId::HandTipL => "HandTipL",
            JointId::HandTipR => "HandTipR",
            JointId::ThumbL => "ThumbL",
            JointId::ThumbR => "ThumbR",
            JointId::HipL => "HipL",
            JointId::HipR => "HipR",
            JointId::KneeL => "KneeL",
            JointId::KneeR => "KneeR",
            JointId::AnkleL => "AnkleL",
            JointId::AnkleR => "AnkleR",
            JointId::FootL => "FootL",
            JointId::FootR => "FootR",
        }
    }

    /// The same joint on the opposite body side; midline joints map to themselves.
    pub fn mirrored(self) -> JointId {
        use JointId::*;
        match self {
            ShoulderL => ShoulderR,
            ShoulderR => ShoulderL,
            ElbowL => ElbowR,
            ElbowR => ElbowL,
            WristL => WristR,
            WristR => WristL,
            HandL => HandR,
            HandR => HandL,
            HandTipL => HandTipR,
            HandTipR => HandTipL,
            ThumbL => ThumbR,
            ThumbR => ThumbL,
            HipL => HipR,
            HipR => HipL,
            KneeL => KneeR,
            KneeR => KneeL,
            AnkleL => AnkleR,
            AnkleR => AnkleL,
            FootL => FootR,
            FootR => FootL,
            other => other,
        }
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tracking state reported by the body tracker for one joint.
///
/// Ordered from least to most reliable so `min` picks the pessimistic value.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Confidence {
    #[default]
    NotTracked = 0,
    Inferred = 1,
    Tracked = 2,
}

impl Confidence {
    pub fn from_byte(b: u8) -> Option<Confidence> {
        match b {
            0 => Some(Confidence::NotTracked),
            1 => Some(Confidence::Inferred),
            2 => Some(Confidence::Tracked),
            _ => None,
        }
    }

    #[inline]
    pub fn as_byte(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn is_tracked(self) -> bool {
        self != Confidence::NotTracked
    }
}

/// One joint sample: position in meters (camera frame) plus tracking confidence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    pub position: [f32; 3],
    pub confidence: Confidence,
}

impl Joint {
    pub fn new(position: [f32; 3], confidence: Confidence) -> Self {
        Joint {
            position,
            confidence,
        }
    }

    pub fn tracked(x: f32, y: f32, z: f32) -> Self {
        Joint::new([x, y, z], Confidence::Tracked)
    }
}

/// One timestamped skeleton for one user.
///
/// `joints` is indexed by [`JointId::ordinal`]. It is a `Vec` rather than an
/// array so malformed input can be represented and reported by
/// [`validate_frame`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonFrame {
    pub user_id: u32,
    pub timestamp_ms: u64,
    pub joints: Vec<Joint>,
}

impl SkeletonFrame {
    /// A frame with every joint at the origin and `NotTracked`.
    pub fn zeroed(user_id: u32, timestamp_ms: u64) -> Self {
        SkeletonFrame {
            user_id,
            timestamp_ms,
            joints: vec![Joint::default(); JOINT_COUNT],
        }
    }

    /// Panics if the frame does not hold a full joint set.
    #[inline]
    pub fn joint(&self, id: JointId) -> &Joint {
        &self.joints[id.ordinal()]
    }

    #[inline]
    pub fn joint_mut(&mut self, id: JointId) -> &mut Joint {
        &mut self.joints[id.ordinal()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    JointCount { found: usize },
    NonFinite { joint: usize },
    OutOfRange { joint: usize, distance_m: f32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::JointCount { found } => {
                write!(f, "joint count: expected {JOINT_COUNT}, found {found}")
            }
            Violation::NonFinite { joint } => {
                write!(f, "non-finite position at joint {}", joint_label(*joint))
            }
            Violation::OutOfRange { joint, distance_m } => write!(
                f,
                "position out of range at joint {}: {distance_m} m",
                joint_label(*joint)
            ),
        }
    }
}

fn joint_label(ordinal: usize) -> String {
    JointId::from_ordinal(ordinal)
        .map(|j| j.name().to_string())
        .unwrap_or_else(|| format!("#{ordinal}"))
}

/// Checks a frame against the skeleton invariants and reports every violation found.
pub fn validate_frame(frame: &SkeletonFrame) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if frame.joints.len() != JOINT_COUNT {
        violations.push(Violation::JointCount {
            found: frame.joints.len(),
        });
    }
    for (i, joint) in frame.joints.iter().enumerate() {
        let p = joint.position;
        if p.iter().any(|c| !c.is_finite()) {
            violations.push(Violation::NonFinite { joint: i });
            continue;
        }
        let distance_m = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if distance_m >= MAX_JOINT_DISTANCE_M {
            violations.push(Violation::OutOfRange {
                joint: i,
                distance_m,
            });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
