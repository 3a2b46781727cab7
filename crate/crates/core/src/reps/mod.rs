//! Repetition segmentation, inclusion rules and per-limb performance metrics.
//!
//! A repetition runs from the start posture to the peak joint angle and
//! back. Its movement velocity is `(θ_peak − θ_0) / (t_peak − t_0)`.

mod metrics_csv;
mod segment;
mod summary;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use metrics_csv::{read_metrics_csv, write_metrics_csv, METRICS_CSV_HEADER};
pub use segment::{
    apply_exclusions, label_windows, quantile, segment_all, segment_from_labels, segment_reps,
};
pub use summary::{rep_velocity, summarize, ExerciseSummary, SummaryFlag, STUDY_REP_RANGE};

/// Thresholds for automatic segmentation and exclusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentationConfig {
    /// Quantile of θ used as the resting baseline.
    pub baseline_quantile: f64,
    /// Start/end threshold, as a fraction of (max θ − baseline) above the baseline.
    pub rise_threshold: f64,
    pub min_prominence_deg: f64,
    /// Minimum separation between peaks, seconds.
    pub min_rep_duration_s: f64,
    /// Reps whose `θ_peak − θ_0` is below this are excluded.
    pub min_excursion_deg: f64,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig {
            baseline_quantile: 0.10,
            rise_threshold: 0.10,
            min_prominence_deg: 5.0,
            min_rep_duration_s: 0.5,
            min_excursion_deg: 10.0,
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<(), RepError> {
        let fractions = [self.baseline_quantile, self.rise_threshold];
        let positives = [
            self.min_prominence_deg,
            self.min_rep_duration_s,
            self.min_excursion_deg,
        ];
        if fractions.iter().any(|&f| !(f > 0.0 && f < 1.0))
            || positives.iter().any(|&v| !(v > 0.0 && v.is_finite()))
        {
            return Err(RepError::InvalidConfig(format!("{self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    /// The excursion is too small to count as a clearly defined peak.
    UnclearPeak,
    /// The peak borders a tracking gap.
    OutOfView,
}

impl fmt::Display for ExclusionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExclusionReason::UnclearPeak => "unclear peak",
            ExclusionReason::OutOfView => "out of view",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepSource {
    Automatic,
    Manual,
}

/// One segmented repetition. Times are seconds on the series time axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Repetition {
    pub t_0: f64,
    pub t_peak: f64,
    pub t_end: f64,
    pub theta_0: f64,
    pub theta_peak: f64,
    /// The peak touches a tracking gap or a bridged (interpolated) stretch.
    pub at_tracking_gap: bool,
    pub source: RepSource,
    /// `None` while included.
    pub excluded: Option<ExclusionReason>,
}

impl Repetition {
    pub fn is_included(&self) -> bool {
        self.excluded.is_none()
    }

    pub fn excursion_deg(&self) -> f64 {
        self.theta_peak - self.theta_0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("zero-duration rise")]
    ZeroDurationRise,
    #[error("no valid repetitions")]
    NoValidRepetitions,
    #[error("invalid segmentation config: {0}")]
    InvalidConfig(String),
    #[error("metrics csv: {0}")]
    Csv(String),
}
