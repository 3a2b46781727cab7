//! Hip joint-angle kinematics for the four study exercises.
//!
//! Angles are measured relative to a pelvis-fixed frame built from the hip
//! and lower-spine joints, so they do not depend on where the subject stands
//! or which way they face relative to the camera.

mod angles;
mod filter;
mod pelvis;
mod series;

use std::fmt;
use std::str::FromStr;

use nalgebra::{Isometry3, Point3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::motion::{Confidence, JointId, MotionError, SkeletonFrame, JOINT_COUNT};

pub use angles::{exercise_angle, hip_frontal_angle, hip_sagittal_angle, MIN_PROJECTION_M};
pub use filter::{filtfilt, lowpass_filter, Biquad, DEFAULT_CUTOFF_HZ, DEFAULT_PAD_S};
pub use pelvis::{pelvis_frame, PelvisFrame, MIN_HIP_WIDTH_M, MIN_SPINE_OFFSET_M};
pub use series::{angle_series, angle_series_with, AngleSeries, SeriesConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exercise {
    HipAbduction,
    HipExtension,
    HipFlexion,
    Squat,
}

/// Anatomical plane an exercise angle is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Sagittal,
    Frontal,
}

impl Exercise {
    pub const ALL: [Exercise; 4] = [
        Exercise::HipAbduction,
        Exercise::HipExtension,
        Exercise::HipFlexion,
        Exercise::Squat,
    ];

    /// Plane and sign applied to the raw plane angle so the exercise's
    /// working direction reads positive.
    pub fn angle_definition(self) -> (Plane, f64) {
        match self {
            Exercise::HipAbduction => (Plane::Frontal, 1.0),
            Exercise::HipExtension => (Plane::Sagittal, -1.0),
            Exercise::HipFlexion | Exercise::Squat => (Plane::Sagittal, 1.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Exercise::HipAbduction => "hip_abduction",
            Exercise::HipExtension => "hip_extension",
            Exercise::HipFlexion => "hip_flexion",
            Exercise::Squat => "squat",
        }
    }
}

impl fmt::Display for Exercise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Exercise {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Exercise::ALL
            .into_iter()
            .find(|e| e.as_str() == key)
            .ok_or_else(|| format!("unknown exercise '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn hip(self) -> JointId {
        match self {
            Side::Left => JointId::HipL,
            Side::Right => JointId::HipR,
        }
    }

    pub fn knee(self) -> JointId {
        match self {
            Side::Left => JointId::KneeL,
            Side::Right => JointId::KneeR,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    /// Impaired/intact tag of this limb given the surgically treated side.
    pub fn limb_status(self, impaired_side: Option<Side>) -> Option<LimbStatus> {
        impaired_side.map(|s| {
            if s == self {
                LimbStatus::Impaired
            } else {
                LimbStatus::Intact
            }
        })
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Side::Left),
            "right" | "r" => Ok(Side::Right),
            _ => Err(format!("unknown side '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimbStatus {
    Impaired,
    Intact,
}

impl LimbStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LimbStatus::Impaired => "impaired",
            LimbStatus::Intact => "intact",
        }
    }
}

impl fmt::Display for LimbStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LimbStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "impaired" => Ok(LimbStatus::Impaired),
            "intact" => Ok(LimbStatus::Intact),
            _ => Err(format!("unknown limb status '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("joint {0} is not tracked")]
    UntrackedJoint(JointId),
    #[error("degenerate pelvis")]
    DegeneratePelvis,
    #[error("indeterminate angle: thigh projection shorter than 1 cm")]
    IndeterminateAngle,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("untrackable stream: {invalid} of {total} samples lack a valid angle")]
    UntrackableStream { invalid: usize, total: usize },
    #[error("too short to filter: {len} samples, need more than {pad}")]
    TooShortToFilter { len: usize, pad: usize },
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error(transparent)]
    Motion(#[from] MotionError),
}

/// Read access to joint positions (meters) and confidences.
pub trait Skeleton {
    fn position(&self, id: JointId) -> Vector3<f64>;
    fn confidence(&self, id: JointId) -> Confidence;
}

impl Skeleton for SkeletonFrame {
    fn position(&self, id: JointId) -> Vector3<f64> {
        match self.joints.get(id.ordinal()) {
            Some(j) => Vector3::new(
                j.position[0] as f64,
                j.position[1] as f64,
                j.position[2] as f64,
            ),
            None => Vector3::zeros(),
        }
    }

    fn confidence(&self, id: JointId) -> Confidence {
        self.joints
            .get(id.ordinal())
            .map_or(Confidence::NotTracked, |j| j.confidence)
    }
}

/// Double-precision skeleton pose, used for geometry that must not be
/// quantised to the wire's f32 precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    pub positions: [Vector3<f64>; JOINT_COUNT],
    pub confidences: [Confidence; JOINT_COUNT],
}

impl Default for Pose {
    fn default() -> Self {
        Pose {
            positions: [Vector3::zeros(); JOINT_COUNT],
            confidences: [Confidence::Tracked; JOINT_COUNT],
        }
    }
}

impl Pose {
    pub fn from_frame(frame: &SkeletonFrame) -> Pose {
        let mut pose = Pose::default();
        for id in JointId::ALL {
            pose.positions[id.ordinal()] = frame.position(id);
            pose.confidences[id.ordinal()] = frame.confidence(id);
        }
        pose
    }

    pub fn to_frame(&self, user_id: u32, timestamp_ms: u64) -> SkeletonFrame {
        let mut frame = SkeletonFrame::zeroed(user_id, timestamp_ms);
        for (i, joint) in frame.joints.iter_mut().enumerate() {
            let p = self.positions[i];
            joint.position = [p.x as f32, p.y as f32, p.z as f32];
            joint.confidence = self.confidences[i];
        }
        frame
    }

    pub fn set(&mut self, id: JointId, position: Vector3<f64>) {
        self.positions[id.ordinal()] = position;
    }

    /// Applies a rigid motion to every joint.
    pub fn transformed(&self, motion: &Isometry3<f64>) -> Pose {
        let mut out = self.clone();
        for p in out.positions.iter_mut() {
            *p = (motion * Point3::from(*p)).coords;
        }
        out
    }

    /// Reflects through the x = 0 plane and swaps left/right joint labels.
    pub fn mirrored(&self) -> Pose {
        let mut out = self.clone();
        for id in JointId::ALL {
            let src = id.mirrored().ordinal();
            let p = self.positions[src];
            out.positions[id.ordinal()] = Vector3::new(-p.x, p.y, p.z);
            out.confidences[id.ordinal()] = self.confidences[src];
        }
        out
    }
}

impl Skeleton for Pose {
    fn position(&self, id: JointId) -> Vector3<f64> {
        self.positions[id.ordinal()]
    }

    fn confidence(&self, id: JointId) -> Confidence {
        self.confidences[id.ordinal()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exercise_names_parse() {
        for e in Exercise::ALL {
            assert_eq!(e.as_str().parse::<Exercise>(), Ok(e));
        }
        assert_eq!("Hip-Abduction".parse::<Exercise>(), Ok(Exercise::HipAbduction));
        assert!("lunge".parse::<Exercise>().is_err());
    }

    #[test]
    fn limb_status_requires_declared_side() {
        assert_eq!(Side::Left.limb_status(None), None);
        assert_eq!(
            Side::Left.limb_status(Some(Side::Left)),
            Some(LimbStatus::Impaired)
        );
        assert_eq!(
            Side::Right.limb_status(Some(Side::Left)),
            Some(LimbStatus::Intact)
        );
    }

    #[test]
    fn pose_frame_conversion_preserves_f32_values() {
        let mut frame = SkeletonFrame::zeroed(4, 99);
        frame.joint_mut(JointId::Head).position = [0.1, 1.7, 2.3];
        frame.joint_mut(JointId::Head).confidence = Confidence::Inferred;
        assert_eq!(Pose::from_frame(&frame).to_frame(4, 99), frame);
    }
}
