use nalgebra::Vector3;

use super::{KinematicsError, Skeleton};
use crate::motion::JointId;

pub const MIN_HIP_WIDTH_M: f64 = 0.01;
/// Minimum spine offset orthogonal to the hip axis before the frame is degenerate.
pub const MIN_SPINE_OFFSET_M: f64 = 0.01;

/// Orthonormal right-handed frame attached to the pelvis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PelvisFrame {
    pub origin: Vector3<f64>,
    /// Points from the left hip to the right hip.
    pub lateral: Vector3<f64>,
    pub up: Vector3<f64>,
    /// `lateral × up`.
    pub forward: Vector3<f64>,
}

pub(crate) fn require_tracked<S: Skeleton + ?Sized>(
    s: &S,
    joints: &[JointId],
) -> Result<(), KinematicsError> {
    match joints.iter().find(|&&j| !s.confidence(j).is_tracked()) {
        Some(&j) => Err(KinematicsError::UntrackedJoint(j)),
        None => Ok(()),
    }
}

pub fn pelvis_frame<S: Skeleton + ?Sized>(s: &S) -> Result<PelvisFrame, KinematicsError> {
    require_tracked(
        s,
        &[JointId::HipL, JointId::HipR, JointId::SpineBase, JointId::SpineMid],
    )?;
    let hip_axis = s.position(JointId::HipR) - s.position(JointId::HipL);
    let width = hip_axis.norm();
    if !(width >= MIN_HIP_WIDTH_M) {
        return Err(KinematicsError::DegeneratePelvis);
    }
    let lateral = hip_axis / width;

    let origin = s.position(JointId::SpineBase);
    let spine = s.position(JointId::SpineMid) - origin;
    let up_raw = spine - lateral * spine.dot(&lateral);
    let up_len = up_raw.norm();
    if !(up_len >= MIN_SPINE_OFFSET_M) {
        return Err(KinematicsError::DegeneratePelvis);
    }
    let up = up_raw / up_len;
    let forward = lateral.cross(&up);
    Ok(PelvisFrame {
        origin,
        lateral,
        up,
        forward,
    })
}
