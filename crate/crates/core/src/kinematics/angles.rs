use super::pelvis::require_tracked;
use super::{pelvis_frame, Exercise, KinematicsError, Plane, Side, Skeleton};

/// Shortest in-plane thigh projection for which an angle is defined.
pub const MIN_PROJECTION_M: f64 = 0.01;

/// Hip angle in the sagittal (forward–up) plane, in degrees.
///
/// Zero with the knee straight below the hip, positive as the knee moves
/// along the pelvis `forward` axis (flexion), negative behind it (extension).
pub fn hip_sagittal_angle<S: Skeleton + ?Sized>(s: &S, side: Side) -> Result<f64, KinematicsError> {
    let pelvis = pelvis_frame(s)?;
    require_tracked(s, &[side.hip(), side.knee()])?;
    let thigh = s.position(side.knee()) - s.position(side.hip());
    let fwd = thigh.dot(&pelvis.forward);
    let up = thigh.dot(&pelvis.up);
    if !(fwd.hypot(up) >= MIN_PROJECTION_M) {
        return Err(KinematicsError::IndeterminateAngle);
    }
    Ok(fwd.atan2(-up).to_degrees())
}

/// Hip angle in the frontal (lateral–up) plane, in degrees.
///
/// Positive when the knee moves away from the body midline, for either leg.
pub fn hip_frontal_angle<S: Skeleton + ?Sized>(s: &S, side: Side) -> Result<f64, KinematicsError> {
    let pelvis = pelvis_frame(s)?;
    require_tracked(s, &[side.hip(), side.knee()])?;
    let thigh = s.position(side.knee()) - s.position(side.hip());
    let outward = match side {
        Side::Left => -thigh.dot(&pelvis.lateral),
        Side::Right => thigh.dot(&pelvis.lateral),
    };
    let up = thigh.dot(&pelvis.up);
    if !(outward.hypot(up) >= MIN_PROJECTION_M) {
        return Err(KinematicsError::IndeterminateAngle);
    }
    Ok(outward.atan2(-up).to_degrees())
}

/// The angle tracked for `exercise`, signed so the exercise direction is positive.
pub fn exercise_angle<S: Skeleton + ?Sized>(
    s: &S,
    exercise: Exercise,
    side: Side,
) -> Result<f64, KinematicsError> {
    let (plane, sign) = exercise.angle_definition();
    let raw = match plane {
        Plane::Sagittal => hip_sagittal_angle(s, side)?,
        Plane::Frontal => hip_frontal_angle(s, side)?,
    };
    Ok(sign * raw)
}
