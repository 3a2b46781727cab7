use super::{ExclusionReason, RepSource, Repetition, SegmentationConfig};
use crate::kinematics::{AngleSeries, Exercise, Side};
use crate::motion::{EventLabel, LabelKind};

/// Linear-interpolation quantile (the "type 7" definition).
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo as f64))
}

#[derive(Debug, Clone, Copy)]
struct Peak {
    index: usize,
    edge: bool,
}

/// Local maxima; a flat top is reported at its middle sample. Samples at an
/// end bordering a tracking gap also count when they exceed their neighbour.
fn local_maxima(theta: &[f64], open_start: bool, open_end: bool) -> Vec<Peak> {
    let n = theta.len();
    let mut peaks = Vec::new();
    if n < 2 {
        return peaks;
    }
    if open_start && theta[0] > theta[1] {
        peaks.push(Peak { index: 0, edge: true });
    }
    let mut i = 1;
    while i + 1 < n {
        if theta[i - 1] < theta[i] {
            let mut j = i;
            while j + 1 < n && theta[j + 1] == theta[i] {
                j += 1;
            }
            if j + 1 < n && theta[j + 1] < theta[i] {
                peaks.push(Peak {
                    index: (i + j) / 2,
                    edge: false,
                });
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    if open_end && theta[n - 1] > theta[n - 2] {
        peaks.push(Peak {
            index: n - 1,
            edge: true,
        });
    }
    peaks
}

/// Height of a peak above the higher of its two bases. A side with no data
/// (a series end) is ignored rather than treated as a base.
fn prominence(theta: &[f64], index: usize) -> f64 {
    let h = theta[index];
    let left = theta[..index]
        .iter()
        .rev()
        .take_while(|&&v| v <= h)
        .copied()
        .reduce(f64::min);
    let right = theta[index + 1..]
        .iter()
        .take_while(|&&v| v <= h)
        .copied()
        .reduce(f64::min);
    let base = match (left, right) {
        (Some(l), Some(r)) => l.max(r),
        (Some(b), None) | (None, Some(b)) => b,
        (None, None) => h,
    };
    h - base
}

/// Keeps the highest peaks, dropping any within `min_gap` samples of a higher one.
fn enforce_separation(mut peaks: Vec<Peak>, theta: &[f64], min_gap: f64) -> Vec<Peak> {
    peaks.sort_by(|a, b| theta[b.index].total_cmp(&theta[a.index]).then(a.index.cmp(&b.index)));
    let mut kept: Vec<Peak> = Vec::new();
    for p in peaks {
        if kept
            .iter()
            .all(|k| (k.index as f64 - p.index as f64).abs() >= min_gap)
        {
            kept.push(p);
        }
    }
    kept.sort_by_key(|p| p.index);
    kept
}

fn filled_near(series: &AngleSeries, index: usize) -> bool {
    let lo = index.saturating_sub(1);
    let hi = (index + 1).min(series.len() - 1);
    series.filled[lo..=hi].iter().any(|&f| f)
}

/// Detects repetitions in one filtered angle series.
///
/// Candidate peaks are local maxima with sufficient prominence, at least
/// `min_rep_duration_s` apart. Each excursion above
/// `baseline + rise_threshold · (max − baseline)` yields one repetition at its
/// highest candidate; `t_0`/`t_end` are the interpolated threshold crossings.
pub fn segment_reps(series: &AngleSeries, cfg: &SegmentationConfig) -> Vec<Repetition> {
    let theta = &series.theta;
    let n = theta.len();
    if n < 3 {
        return Vec::new();
    }
    let Some(baseline) = quantile(theta, cfg.baseline_quantile) else {
        return Vec::new();
    };
    let max = theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - baseline;
    if !(range > 0.0) {
        return Vec::new();
    }
    let level = baseline + cfg.rise_threshold * range;

    let candidates: Vec<Peak> = local_maxima(theta, series.open_start, series.open_end)
        .into_iter()
        .filter(|p| theta[p.index] > level && prominence(theta, p.index) >= cfg.min_prominence_deg)
        .collect();
    let peaks = enforce_separation(candidates, theta, cfg.min_rep_duration_s * series.rate_hz);

    let mut reps: Vec<(Option<usize>, Repetition)> = Vec::new();
    for peak in peaks {
        let p = peak.index;
        let start = (0..p).rev().find(|&j| theta[j] < level);
        let end = (p + 1..n).find(|&k| theta[k] < level);
        let (idx_0, theta_0) = match start {
            Some(j) => (j as f64 + (level - theta[j]) / (theta[j + 1] - theta[j]), level),
            None => (0.0, theta[0]),
        };
        let idx_end = match end {
            Some(k) => (k - 1) as f64 + (theta[k - 1] - level) / (theta[k - 1] - theta[k]),
            None => (n - 1) as f64,
        };
        if !(idx_0 < p as f64) {
            continue;
        }
        let at_tracking_gap = peak.edge
            || (start.is_none() && series.open_start)
            || (end.is_none() && series.open_end)
            || filled_near(series, p);
        let rep = Repetition {
            t_0: series.time(idx_0),
            t_peak: series.time(p as f64),
            t_end: series.time(idx_end),
            theta_0,
            theta_peak: theta[p],
            at_tracking_gap,
            source: RepSource::Automatic,
            excluded: None,
        };
        // Peaks inside the same excursion share a start crossing; keep the highest.
        match reps.last_mut() {
            Some((prev_start, prev)) if *prev_start == start => {
                if rep.theta_peak > prev.theta_peak {
                    *prev = rep;
                }
            }
            _ => reps.push((start, rep)),
        }
    }
    reps.into_iter().map(|(_, r)| r).collect()
}

/// Segments every piece of a (possibly split) angle trace.
pub fn segment_all(series: &[AngleSeries], cfg: &SegmentationConfig) -> Vec<Repetition> {
    series.iter().flat_map(|s| segment_reps(s, cfg)).collect()
}

/// Start/end label pairs (absolute ms) that apply to one user, exercise and side.
///
/// Labels without a user, exercise or side apply to all. Each `Start` is paired
/// with the next `End`; unmatched labels are ignored.
pub fn label_windows(
    labels: &[EventLabel],
    user_id: u32,
    exercise: Exercise,
    side: Side,
) -> Vec<(u64, u64)> {
    let mut relevant: Vec<&EventLabel> = labels
        .iter()
        .filter(|l| matches!(l.kind, LabelKind::Start | LabelKind::End))
        .filter(|l| l.user_id.is_none_or(|u| u == user_id))
        .filter(|l| l.exercise.is_none_or(|e| e == exercise))
        .filter(|l| l.side.is_none_or(|s| s == side))
        .collect();
    relevant.sort_by_key(|l| l.timestamp_ms);
    let mut windows = Vec::new();
    let mut open: Option<u64> = None;
    for l in relevant {
        match (l.kind, open) {
            (LabelKind::Start, _) => open = Some(l.timestamp_ms),
            (LabelKind::End, Some(start)) if l.timestamp_ms > start => {
                windows.push((start, l.timestamp_ms));
                open = None;
            }
            _ => {}
        }
    }
    windows
}

/// Builds repetitions from manual start/end windows: `t_0` is the start label,
/// the peak is the maximum within the window, `t_end` the end label.
pub fn segment_from_labels(series: &[AngleSeries], windows: &[(u64, u64)]) -> Vec<Repetition> {
    let mut reps = Vec::new();
    for &(start_ms, end_ms) in windows {
        let Some(s) = series.iter().find(|s| {
            let i = s.index_of(s.relative_time(start_ms));
            i >= 0.0 && i <= (s.len() - 1) as f64
        }) else {
            continue;
        };
        let idx_0 = s.index_of(s.relative_time(start_ms));
        let idx_end_raw = s.index_of(s.relative_time(end_ms));
        let last = (s.len() - 1) as f64;
        let idx_end = idx_end_raw.min(last);
        let first = idx_0.ceil() as usize;
        let stop = idx_end.floor() as usize;
        if first > stop {
            continue;
        }
        let p = (first..=stop)
            .max_by(|&a, &b| s.theta[a].total_cmp(&s.theta[b]).then(b.cmp(&a)))
            .unwrap();
        if !(p as f64 > idx_0) {
            continue;
        }
        let runs_past_end = idx_end_raw > last && s.open_end;
        reps.push(Repetition {
            t_0: s.time(idx_0),
            t_peak: s.time(p as f64),
            t_end: s.time(idx_end),
            theta_0: s.value_at(idx_0),
            theta_peak: s.theta[p],
            at_tracking_gap: runs_past_end
                || (p as f64 >= last && s.open_end)
                || filled_near(s, p),
            source: RepSource::Manual,
            excluded: None,
        });
    }
    reps
}

/// Flags repetitions that lack a clearly defined peak.
pub fn apply_exclusions(reps: &[Repetition], cfg: &SegmentationConfig) -> Vec<Repetition> {
    reps.iter()
        .map(|r| {
            let excluded = if r.at_tracking_gap {
                Some(ExclusionReason::OutOfView)
            } else if r.excursion_deg() < cfg.min_excursion_deg {
                Some(ExclusionReason::UnclearPeak)
            } else {
                None
            };
            Repetition {
                excluded,
                ..r.clone()
            }
        })
        .collect()
}
