use super::{Joint, MotionError, SkeletonFrame};

/// Default capture/resampling rate in Hz.
pub const DEFAULT_RATE_HZ: f64 = 30.0;

/// Millisecond offset of the `k`-th output sample from the first input frame.
#[inline]
pub(crate) fn sample_offset_ms(k: usize, rate_hz: f64) -> u64 {
    (k as f64 * 1000.0 / rate_hz).round() as u64
}

/// Resamples one user's frame stream onto a uniform grid.
///
/// Output instants are `t0 + round(k * 1000 / rate)` milliseconds for every `k`
/// that stays within the input time span. Joint positions are linearly
/// interpolated between the bracketing input frames and take the lower of the
/// two confidences. An instant that coincides with an input timestamp copies
/// that frame unchanged, which makes the operation idempotent on streams that
/// are already on the grid.
pub fn resample_uniform(
    frames: &[SkeletonFrame],
    target_rate_hz: f64,
) -> Result<Vec<SkeletonFrame>, MotionError> {
    if !(target_rate_hz.is_finite() && target_rate_hz > 0.0 && target_rate_hz <= 1000.0) {
        return Err(MotionError::InvalidRate(target_rate_hz));
    }
    if frames.len() < 2 {
        return Err(MotionError::InsufficientData);
    }
    for (i, pair) in frames.windows(2).enumerate() {
        if pair[1].timestamp_ms <= pair[0].timestamp_ms {
            return Err(MotionError::NonMonotonic { index: i + 1 });
        }
    }

    let t0 = frames[0].timestamp_ms;
    let t_end = frames[frames.len() - 1].timestamp_ms;
    let mut out = Vec::new();
    let mut upper = 1;
    for k in 0.. {
        let t = t0 + sample_offset_ms(k, target_rate_hz);
        if t > t_end {
            break;
        }
        while frames[upper].timestamp_ms < t {
            upper += 1;
        }
        let hi = &frames[upper];
        let lo = &frames[upper - 1];
        let frame = if hi.timestamp_ms == t {
            hi.clone()
        } else if lo.timestamp_ms == t {
            lo.clone()
        } else {
            let w = (t - lo.timestamp_ms) as f64 / (hi.timestamp_ms - lo.timestamp_ms) as f64;
            interpolate(lo, hi, w, t)
        };
        out.push(frame);
    }
    Ok(out)
}

fn interpolate(lo: &SkeletonFrame, hi: &SkeletonFrame, w: f64, t: u64) -> SkeletonFrame {
    let joints = lo
        .joints
        .iter()
        .zip(&hi.joints)
        .map(|(a, b)| {
            let mut position = [0.0f32; 3];
            for (axis, p) in position.iter_mut().enumerate() {
                let (pa, pb) = (a.position[axis] as f64, b.position[axis] as f64);
                *p = (pa + (pb - pa) * w) as f32;
            }
            Joint::new(position, a.confidence.min(b.confidence))
        })
        .collect();
    SkeletonFrame {
        user_id: lo.user_id,
        timestamp_ms: t,
        joints,
    }
}
