use std::collections::HashMap;
use std::thread;
use std::time::{Duration, Instant};

use super::SynthError;
use crate::motion::{Recording, SkeletonFrame};

/// A frame due `at` after replay start, with its timestamp already rewritten.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledFrame {
    pub at: Duration,
    pub frame: SkeletonFrame,
}

/// Emission plan for `recording` played at `speed`: delays between frames are
/// divided by `speed` and timestamps are rebased to `base_ms` on that clock.
/// Per user, rewritten timestamps stay strictly increasing.
pub fn replay_schedule(
    recording: &Recording,
    speed: f64,
    base_ms: u64,
) -> Result<Vec<ScheduledFrame>, SynthError> {
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(SynthError::InvalidSpeed(speed));
    }
    let first = recording
        .frames
        .iter()
        .map(|f| f.timestamp_ms)
        .min()
        .ok_or(SynthError::EmptyRecording)?;
    let mut last_ts: HashMap<u32, u64> = HashMap::new();
    let schedule = recording
        .frames
        .iter()
        .map(|f| {
            let offset_ms = (f.timestamp_ms - first) as f64 / speed;
            let mut ts = base_ms + offset_ms.round() as u64;
            if let Some(&prev) = last_ts.get(&f.user_id) {
                ts = ts.max(prev + 1);
            }
            last_ts.insert(f.user_id, ts);
            ScheduledFrame {
                at: Duration::from_secs_f64(offset_ms / 1000.0),
                frame: SkeletonFrame {
                    timestamp_ms: ts,
                    ..f.clone()
                },
            }
        })
        .collect();
    Ok(schedule)
}

/// Replays on the current thread, sleeping until each frame's absolute
/// deadline so per-frame jitter does not accumulate. Timestamps are rebased
/// to `base_ms`; the sink may abort the replay by returning an error.
pub fn replay_blocking<E>(
    recording: &Recording,
    speed: f64,
    base_ms: u64,
    mut sink: impl FnMut(SkeletonFrame) -> Result<(), E>,
) -> Result<Result<(), E>, SynthError> {
    let schedule = replay_schedule(recording, speed, base_ms)?;
    let start = Instant::now();
    for item in schedule {
        let deadline = start + item.at;
        let now = Instant::now();
        if deadline > now {
            thread::sleep(deadline - now);
        }
        if let Err(e) = sink(item.frame) {
            return Ok(Err(e));
        }
    }
    Ok(Ok(()))
}
