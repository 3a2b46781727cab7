//! Deterministic synthetic skeleton streams and recording replay.
//!
//! The generator poses a kinematic chain so that the hip angle measured by
//! [`crate::kinematics`] follows the scripted profile exactly, which makes
//! its scripts the ground truth for the analysis pipeline.

mod body;
mod replay;
mod script;

use thiserror::Error;

pub use body::BodyModel;
pub use replay::{replay_blocking, replay_schedule, ScheduledFrame};
pub use script::{generate, generate_session, ExerciseScript, Profile, SessionScript};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid script: {0}")]
    InvalidScript(String),
    #[error("invalid body model: {0}")]
    InvalidBody(String),
    #[error("empty recording")]
    EmptyRecording,
    #[error("invalid replay speed {0}")]
    InvalidSpeed(f64),
}
