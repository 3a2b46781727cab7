//! End-to-end analysis of a recording: resample → angles → filter →
//! segment → exclude → summarize.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{angle_series_with, AngleSeries, Exercise, KinematicsError, LimbStatus, SeriesConfig, Side};
use crate::motion::{Recording, SkeletonFrame};
use crate::reps::{
    apply_exclusions, label_windows, segment_all, segment_from_labels, summarize, ExerciseSummary,
    RepError, RepSource, Repetition, SegmentationConfig,
};
use crate::wire::Role;

/// Tunables for the whole pipeline, loadable from JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub series: SeriesConfig,
    pub segmentation: SegmentationConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRequest {
    pub exercise: Exercise,
    pub side: Side,
    /// Defaults to the patient, or the only tracked user.
    pub user_id: Option<u32>,
    /// Restrict to frames with timestamps in `[from, to]` (ms).
    pub window_ms: Option<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub user_id: u32,
    pub exercise: Exercise,
    pub side: Side,
    pub limb_status: Option<LimbStatus>,
    /// `Manual` when start/end labels in the recording defined the repetitions.
    pub source: RepSource,
    pub series: Vec<AngleSeries>,
    pub reps: Vec<Repetition>,
    pub summary: Result<ExerciseSummary, RepError>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("recording has no frames")]
    NoFrames,
    #[error("user {0} has no frames in the recording")]
    UnknownUser(u32),
    #[error("several users tracked ({0:?}); choose one")]
    AmbiguousUser(Vec<u32>),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

fn select_user(rec: &Recording, requested: Option<u32>) -> Result<u32, PipelineError> {
    let users = rec.user_ids();
    if users.is_empty() {
        return Err(PipelineError::NoFrames);
    }
    if let Some(id) = requested {
        return if users.contains(&id) {
            Ok(id)
        } else {
            Err(PipelineError::UnknownUser(id))
        };
    }
    let patient = rec
        .header
        .participants
        .iter()
        .find(|p| p.role == Role::Patient && users.contains(&p.user_id));
    match (patient, users.as_slice()) {
        (Some(p), _) => Ok(p.user_id),
        (None, [only]) => Ok(*only),
        (None, _) => Err(PipelineError::AmbiguousUser(users)),
    }
}

pub fn analyze_frames(
    frames: &[SkeletonFrame],
    exercise: Exercise,
    side: Side,
    cfg: &AnalysisConfig,
) -> Result<(Vec<AngleSeries>, Vec<Repetition>), PipelineError> {
    cfg.segmentation.validate()?;
    let series = angle_series_with(frames, exercise, side, &cfg.series)?;
    let reps = apply_exclusions(&segment_all(&series, &cfg.segmentation), &cfg.segmentation);
    Ok((series, reps))
}

/// Analyses one user's exercise. Manual start/end labels for the user,
/// exercise and side take precedence over automatic segmentation.
pub fn analyze_recording(
    rec: &Recording,
    req: &AnalysisRequest,
    cfg: &AnalysisConfig,
) -> Result<Analysis, PipelineError> {
    cfg.segmentation.validate()?;
    let user_id = select_user(rec, req.user_id)?;
    let mut frames = rec.frames_for(user_id);
    if let Some((from, to)) = req.window_ms {
        frames.retain(|f| (from..=to).contains(&f.timestamp_ms));
    }
    let series = angle_series_with(&frames, req.exercise, req.side, &cfg.series)?;
    let windows: Vec<(u64, u64)> = label_windows(&rec.labels, user_id, req.exercise, req.side)
        .into_iter()
        .filter(|&(s, e)| req.window_ms.is_none_or(|(from, to)| s >= from && e <= to))
        .collect();
    let (source, raw) = if windows.is_empty() {
        (RepSource::Automatic, segment_all(&series, &cfg.segmentation))
    } else {
        (RepSource::Manual, segment_from_labels(&series, &windows))
    };
    let reps = apply_exclusions(&raw, &cfg.segmentation);
    let limb_status = req.side.limb_status(
        rec.header
            .participant(user_id)
            .and_then(|p| p.impaired_side),
    );
    let summary = summarize(&reps, req.exercise, req.side, limb_status);
    Ok(Analysis {
        user_id,
        exercise: req.exercise,
        side: req.side,
        limb_status,
        source,
        series,
        reps,
        summary,
    })
}

pub const ANGLES_CSV_HEADER: &str = "t_s,theta_deg";

/// Writes samples as `t_s,theta_deg` with six decimals; `t_s` is relative to
/// the first frame of the analysed stream.
pub fn write_angles_csv<W: Write>(series: &[AngleSeries], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{ANGLES_CSV_HEADER}")?;
    for s in series {
        for (t, theta) in s.samples() {
            writeln!(out, "{t:.6},{theta:.6}")?;
        }
    }
    out.flush()
}
