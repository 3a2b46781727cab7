//! Skeleton data model: joints, frames, validation, uniform resampling and
//! the `.tpr` recording format.
//!
//! Positions are meters in a right-handed camera frame (x right, y up,
//! z toward the camera).

mod joint;
mod recording;
mod resample;

use thiserror::Error;

pub use joint::{
    validate_frame, Confidence, Joint, JointId, SkeletonFrame, Violation, JOINT_COUNT,
    MAX_JOINT_DISTANCE_M,
};
pub use recording::{
    parse_recording, read_recording, write_recording, EventLabel, LabelKind, Participant,
    Recording, RecordingError, RecordingHeader, FILE_EXTENSION, FORMAT_VERSION, MAGIC,
    MAX_HEADER_LEN,
};
pub use resample::{resample_uniform, DEFAULT_RATE_HZ};
pub(crate) use resample::sample_offset_ms;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MotionError {
    #[error("insufficient data: at least two frames are required")]
    InsufficientData,
    #[error("timestamps must strictly increase (frame {index})")]
    NonMonotonic { index: usize },
    #[error("invalid sampling rate {0} Hz")]
    InvalidRate(f64),
}
