use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::{RepError, Repetition};
use crate::kinematics::{Exercise, LimbStatus, Side};
use crate::stats::describe;

/// Number of analysed repetitions per limb and exercise expected in a session.
pub const STUDY_REP_RANGE: RangeInclusive<usize> = 8..=12;

/// Movement velocity of one repetition, degrees per second.
pub fn rep_velocity(rep: &Repetition) -> Result<f64, RepError> {
    let rise = rep.t_peak - rep.t_0;
    if rise == 0.0 {
        return Err(RepError::ZeroDurationRise);
    }
    Ok((rep.theta_peak - rep.theta_0) / rise)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryFlag {
    /// Only one included repetition; standard deviations are reported as 0.
    SingleRep,
    /// Included count falls outside [`STUDY_REP_RANGE`].
    RepCountOutOfRange,
}

impl fmt::Display for SummaryFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SummaryFlag::SingleRep => "n=1",
            SummaryFlag::RepCountOutOfRange => "n outside 8-12",
        })
    }
}

/// Per-limb aggregate of the included repetitions of one exercise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExerciseSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participant: Option<String>,
    pub exercise: Exercise,
    pub side: Side,
    pub limb_status: Option<LimbStatus>,
    pub n_detected: usize,
    pub n_included: usize,
    pub peak_mean_deg: f64,
    pub peak_sd_deg: f64,
    pub vel_mean_dps: f64,
    pub vel_sd_dps: f64,
    #[serde(default)]
    pub flags: Vec<SummaryFlag>,
}

/// Mean and sample SD of peak angle and velocity over included repetitions.
pub fn summarize(
    reps: &[Repetition],
    exercise: Exercise,
    side: Side,
    limb_status: Option<LimbStatus>,
) -> Result<ExerciseSummary, RepError> {
    let included: Vec<&Repetition> = reps.iter().filter(|r| r.is_included()).collect();
    if included.is_empty() {
        return Err(RepError::NoValidRepetitions);
    }
    let peaks: Vec<f64> = included.iter().map(|r| r.theta_peak).collect();
    let velocities: Vec<f64> = included
        .iter()
        .map(|r| rep_velocity(r))
        .collect::<Result<_, _>>()?;
    let peak = describe(&peaks).expect("non-empty");
    let vel = describe(&velocities).expect("non-empty");

    let mut flags = Vec::new();
    if included.len() == 1 {
        flags.push(SummaryFlag::SingleRep);
    }
    if !STUDY_REP_RANGE.contains(&included.len()) {
        flags.push(SummaryFlag::RepCountOutOfRange);
    }
    Ok(ExerciseSummary {
        participant: None,
        exercise,
        side,
        limb_status,
        n_detected: reps.len(),
        n_included: included.len(),
        peak_mean_deg: peak.mean,
        peak_sd_deg: peak.sd,
        vel_mean_dps: vel.mean,
        vel_sd_dps: vel.sd,
        flags,
    })
}
