use serde::{Deserialize, Serialize};

use super::{exercise_angle, lowpass_filter, Exercise, KinematicsError, Side, DEFAULT_CUTOFF_HZ, DEFAULT_PAD_S};
use crate::motion::{resample_uniform, SkeletonFrame, DEFAULT_RATE_HZ};

/// Uniformly sampled joint-angle trace for one exercise and limb.
///
/// A stream interrupted by a long tracking gap is split into several series;
/// `open_start`/`open_end` mark ends that border such a gap. Samples bridged
/// by interpolation over a short gap are flagged in `filled`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSeries {
    pub exercise: Exercise,
    pub side: Side,
    pub rate_hz: f64,
    /// Timestamp (ms) of the stream's first frame; sample times are relative to it.
    pub origin_ms: u64,
    /// Time of the first sample, seconds after `origin_ms`.
    pub t_start: f64,
    /// Angle samples, degrees.
    pub theta: Vec<f64>,
    pub filled: Vec<bool>,
    pub open_start: bool,
    pub open_end: bool,
}

impl AngleSeries {
    pub fn new(exercise: Exercise, side: Side, rate_hz: f64, t_start: f64, theta: Vec<f64>) -> Self {
        let filled = vec![false; theta.len()];
        AngleSeries {
            exercise,
            side,
            rate_hz,
            origin_ms: 0,
            t_start,
            theta,
            filled,
            open_start: false,
            open_end: false,
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    #[inline]
    pub fn time(&self, index: f64) -> f64 {
        self.t_start + index / self.rate_hz
    }

    pub fn duration_s(&self) -> f64 {
        self.len().saturating_sub(1) as f64 / self.rate_hz
    }

    /// `(t seconds, θ degrees)` pairs.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.theta
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.time(i as f64), v))
    }

    /// Linear interpolation of θ at a fractional sample index.
    pub fn value_at(&self, index: f64) -> f64 {
        let last = self.len() - 1;
        let index = index.clamp(0.0, last as f64);
        let i = (index.floor() as usize).min(last.saturating_sub(1));
        let w = index - i as f64;
        if last == 0 {
            return self.theta[0];
        }
        self.theta[i] + (self.theta[i + 1] - self.theta[i]) * w
    }

    /// Converts an absolute timestamp to seconds on this series' time axis.
    pub fn relative_time(&self, timestamp_ms: u64) -> f64 {
        (timestamp_ms as f64 - self.origin_ms as f64) / 1000.0
    }

    /// Fractional sample index of time `t`.
    pub fn index_of(&self, t: f64) -> f64 {
        (t - self.t_start) * self.rate_hz
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesConfig {
    pub rate_hz: f64,
    pub cutoff_hz: f64,
    /// Longest tracking gap bridged by interpolation.
    pub max_gap_s: f64,
    pub min_duration_s: f64,
    /// Streams with a larger fraction of invalid samples are rejected.
    pub max_invalid_fraction: f64,
    pub filter: bool,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            rate_hz: DEFAULT_RATE_HZ,
            cutoff_hz: DEFAULT_CUTOFF_HZ,
            max_gap_s: 0.2,
            min_duration_s: 2.0,
            max_invalid_fraction: 0.5,
            filter: true,
        }
    }
}

pub fn angle_series(
    frames: &[SkeletonFrame],
    exercise: Exercise,
    side: Side,
) -> Result<Vec<AngleSeries>, KinematicsError> {
    angle_series_with(frames, exercise, side, &SeriesConfig::default())
}

/// Resamples one user's frames, computes the exercise angle per sample,
/// bridges short tracking gaps, splits at long ones and low-pass filters
/// each resulting segment.
pub fn angle_series_with(
    frames: &[SkeletonFrame],
    exercise: Exercise,
    side: Side,
    cfg: &SeriesConfig,
) -> Result<Vec<AngleSeries>, KinematicsError> {
    let span_ms = match (frames.first(), frames.last()) {
        (Some(a), Some(b)) if frames.len() >= 2 => b.timestamp_ms.saturating_sub(a.timestamp_ms),
        _ => return Err(KinematicsError::InsufficientData("fewer than two frames".into())),
    };
    if (span_ms as f64) < cfg.min_duration_s * 1000.0 {
        return Err(KinematicsError::InsufficientData(format!(
            "{span_ms} ms of frames, need {} s",
            cfg.min_duration_s
        )));
    }
    let uniform = resample_uniform(frames, cfg.rate_hz)?;
    let angles: Vec<Option<f64>> = uniform
        .iter()
        .map(|f| exercise_angle(f, exercise, side).ok())
        .collect();
    let invalid = angles.iter().filter(|a| a.is_none()).count();
    if invalid as f64 > cfg.max_invalid_fraction * angles.len() as f64 {
        return Err(KinematicsError::UntrackableStream {
            invalid,
            total: angles.len(),
        });
    }

    let origin_ms = uniform[0].timestamp_ms;
    let max_gap_samples = (cfg.max_gap_s * cfg.rate_hz + 1e-9).floor() as usize;
    let mut segments = Vec::new();
    let mut current: Option<AngleSeries> = None;
    let mut i = 0;
    while i < angles.len() {
        if let Some(v) = angles[i] {
            let seg = current.get_or_insert_with(|| {
                let mut s = AngleSeries::new(exercise, side, cfg.rate_hz, i as f64 / cfg.rate_hz, Vec::new());
                s.origin_ms = origin_ms;
                s.open_start = i > 0;
                s
            });
            seg.theta.push(v);
            seg.filled.push(false);
            i += 1;
            continue;
        }
        let gap_start = i;
        while i < angles.len() && angles[i].is_none() {
            i += 1;
        }
        // A gap of `run` missing samples spans `run + 1` sample intervals.
        let run = i - gap_start;
        let bridgeable = i < angles.len() && run < max_gap_samples;
        match (current.as_mut(), bridgeable) {
            (Some(seg), true) => {
                let before = *seg.theta.last().unwrap();
                let after = angles[i].unwrap();
                for k in 1..=run {
                    let w = k as f64 / (run + 1) as f64;
                    seg.theta.push(before + (after - before) * w);
                    seg.filled.push(true);
                }
            }
            (Some(_), false) => {
                let mut seg = current.take().unwrap();
                seg.open_end = true;
                segments.push(seg);
            }
            (None, _) => {}
        }
    }
    segments.extend(current);

    if !cfg.filter {
        return Ok(segments);
    }
    let min_len = (DEFAULT_PAD_S * cfg.rate_hz).round() as usize + 1;
    let longest = segments.iter().map(|s| s.len()).max().unwrap_or(0);
    let filtered: Vec<AngleSeries> = segments
        .iter()
        .filter(|s| s.len() >= min_len)
        .map(|s| lowpass_filter(s, cfg.cutoff_hz))
        .collect::<Result<_, _>>()?;
    if filtered.is_empty() {
        return Err(KinematicsError::TooShortToFilter {
            len: longest,
            pad: min_len - 1,
        });
    }
    Ok(filtered)
}
