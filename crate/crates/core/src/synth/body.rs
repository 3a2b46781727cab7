use nalgebra::{Isometry3, Translation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::kinematics::{Pose, Side};
use crate::motion::JointId;

/// Segment lengths (metres) and where the body stands in camera space.
///
/// Poses are built in a body frame with `+x` towards the right hip, `+y` up
/// and `+z` forward, then placed by `root` (the spine base) and `yaw_deg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BodyModel {
    pub pelvis_width_m: f64,
    pub trunk_m: f64,
    pub thigh_m: f64,
    pub shank_m: f64,
    pub ankle_height_m: f64,
    /// Standing spine-base position in camera coordinates.
    pub root: [f64; 3],
    /// Rotation about the vertical axis; 180° faces a camera at the origin.
    pub yaw_deg: f64,
}

impl Default for BodyModel {
    fn default() -> Self {
        BodyModel {
            pelvis_width_m: 0.2,
            trunk_m: 0.5,
            thigh_m: 0.42,
            shank_m: 0.42,
            ankle_height_m: 0.08,
            root: [0.0, 0.92, 2.2],
            yaw_deg: 180.0,
        }
    }
}

/// Thigh directions in the body frame, as unit vectors from hip to knee.
pub(crate) struct LegPose {
    pub left: Vector3<f64>,
    pub right: Vector3<f64>,
    /// Both knees bend so the shanks return under the hips (squat).
    pub squat: bool,
}

impl BodyModel {
    pub fn validate(&self) -> Result<(), SynthError> {
        let lengths = [
            self.pelvis_width_m,
            self.trunk_m,
            self.thigh_m,
            self.shank_m,
            self.ankle_height_m,
        ];
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite()))
            || self.root.iter().chain([&self.yaw_deg]).any(|v| !v.is_finite())
        {
            return Err(SynthError::InvalidBody(format!("{self:?}")));
        }
        Ok(())
    }

    fn placement(&self) -> Isometry3<f64> {
        Isometry3::from_parts(
            Translation3::new(self.root[0], self.root[1], self.root[2]),
            UnitQuaternion::from_axis_angle(&Vector3::y_axis(), self.yaw_deg.to_radians()),
        )
    }

    pub(crate) fn pose(&self, legs: &LegPose) -> Pose {
        let up = Vector3::y();
        let lateral = Vector3::x();
        let fwd = Vector3::z();
        let mut p = Pose::default();

        // Lower the pelvis in a squat so the ankles stay on the floor.
        let drop = if legs.squat {
            (self.thigh_m + self.shank_m) * (1.0 - legs.left.dot(&-up))
        } else {
            0.0
        };
        let base = -up * drop;
        let half = self.pelvis_width_m / 2.0;
        p.set(JointId::SpineBase, base);
        p.set(JointId::SpineMid, base + up * (0.5 * self.trunk_m));
        p.set(JointId::SpineShoulder, base + up * (0.85 * self.trunk_m));
        p.set(JointId::Neck, base + up * self.trunk_m);
        p.set(JointId::Head, base + up * (self.trunk_m + 0.12));
        for (side, sign) in [(Side::Left, -1.0), (Side::Right, 1.0)] {
            let (shoulder, elbow, wrist, hand, tip, thumb) = match side {
                Side::Left => (
                    JointId::ShoulderL,
                    JointId::ElbowL,
                    JointId::WristL,
                    JointId::HandL,
                    JointId::HandTipL,
                    JointId::ThumbL,
                ),
                Side::Right => (
                    JointId::ShoulderR,
                    JointId::ElbowR,
                    JointId::WristR,
                    JointId::HandR,
                    JointId::HandTipR,
                    JointId::ThumbR,
                ),
            };
            let s = base + up * (0.85 * self.trunk_m) + lateral * (sign * 1.8 * half);
            p.set(shoulder, s);
            p.set(elbow, s - up * 0.28);
            p.set(wrist, s - up * 0.53);
            p.set(hand, s - up * 0.61);
            p.set(tip, s - up * 0.69);
            p.set(thumb, s - up * 0.63 + fwd * 0.04);

            let (hip_id, knee_id, ankle_id, foot_id) = match side {
                Side::Left => (JointId::HipL, JointId::KneeL, JointId::AnkleL, JointId::FootL),
                Side::Right => (JointId::HipR, JointId::KneeR, JointId::AnkleR, JointId::FootR),
            };
            let thigh = match side {
                Side::Left => legs.left,
                Side::Right => legs.right,
            };
            let hip = base + lateral * (sign * half);
            let knee = hip + thigh * self.thigh_m;
            let shank = if legs.squat {
                // Mirror the thigh about the vertical so the ankle sits under the hip.
                let along = thigh.dot(&fwd);
                thigh - fwd * (2.0 * along)
            } else {
                thigh
            };
            let ankle = knee + shank * self.shank_m;
            p.set(hip_id, hip);
            p.set(knee_id, knee);
            p.set(ankle_id, ankle);
            p.set(foot_id, ankle + fwd * 0.12 - up * (0.5 * self.ankle_height_m));
        }
        p.transformed(&self.placement())
    }
}
