//! Motion data model, wire protocol, kinematics, repetition analysis,
//! statistics and synthetic motion for remote hip-rehabilitation sessions.

pub mod kinematics;
pub mod motion;
pub mod pipeline;
pub mod reps;
pub mod stats;
pub mod synth;
pub mod wire;
