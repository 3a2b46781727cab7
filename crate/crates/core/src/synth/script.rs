use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::body::LegPose;
use super::{BodyModel, SynthError};
use crate::kinematics::{Exercise, Plane, Side};
use crate::motion::{sample_offset_ms, SkeletonFrame, DEFAULT_RATE_HZ};

pub const MAX_AMPLITUDE_DEG: f64 = 120.0;
pub const MIN_PERIOD_S: f64 = 0.5;

/// Shape of one repetition's angle over its period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `A·sin(π·t/period)`.
    #[default]
    HalfSine,
    /// Linear rise to `A` over half the period, linear return over the other half.
    LinearRamp,
}

/// One exercise block: `rest, (rep, rest) × n_reps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExerciseScript {
    pub exercise: Exercise,
    #[serde(default = "default_side")]
    pub side: Side,
    #[serde(default = "default_reps")]
    pub n_reps: u32,
    pub amplitude_deg: f64,
    #[serde(default = "default_period")]
    pub period_s: f64,
    #[serde(default = "default_rest")]
    pub rest_s: f64,
    #[serde(default)]
    pub profile: Profile,
    /// SD of Gaussian noise added to the scripted angle, per sample.
    #[serde(default)]
    pub noise_sd_deg: f64,
    /// SD of Gaussian Cartesian jitter added to every joint coordinate.
    #[serde(default)]
    pub jitter_sd_m: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_side() -> Side {
    Side::Left
}
fn default_reps() -> u32 {
    12
}
fn default_period() -> f64 {
    2.0
}
fn default_rest() -> f64 {
    1.0
}

impl ExerciseScript {
    pub fn new(exercise: Exercise, side: Side, amplitude_deg: f64) -> Self {
        ExerciseScript {
            exercise,
            side,
            n_reps: default_reps(),
            amplitude_deg,
            period_s: default_period(),
            rest_s: default_rest(),
            profile: Profile::HalfSine,
            noise_sd_deg: 0.0,
            jitter_sd_m: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |what: &str| Err(SynthError::InvalidScript(what.to_string()));
        if !(0.0..=MAX_AMPLITUDE_DEG).contains(&self.amplitude_deg) {
            return bad("amplitude must lie in [0, 120] degrees");
        }
        if !(self.period_s >= MIN_PERIOD_S && self.period_s.is_finite()) {
            return bad("period must be at least 0.5 s");
        }
        if self.n_reps == 0 {
            return bad("n_reps must be at least 1");
        }
        if !(self.rest_s >= 0.0 && self.rest_s.is_finite()) {
            return bad("rest must be non-negative");
        }
        if !(self.noise_sd_deg >= 0.0 && self.noise_sd_deg.is_finite())
            || !(self.jitter_sd_m >= 0.0 && self.jitter_sd_m.is_finite())
        {
            return bad("noise must be non-negative");
        }
        Ok(())
    }

    pub fn duration_s(&self) -> f64 {
        self.rest_s + self.n_reps as f64 * (self.period_s + self.rest_s)
    }

    /// Noiseless scripted angle at `t` seconds from the block start.
    pub fn angle_at(&self, t: f64) -> f64 {
        let cycle = self.period_s + self.rest_s;
        let local = t - self.rest_s;
        if local < 0.0 {
            return 0.0;
        }
        let rep = (local / cycle).floor();
        if rep >= self.n_reps as f64 {
            return 0.0;
        }
        let u = local - rep * cycle;
        if u >= self.period_s {
            return 0.0;
        }
        let a = self.amplitude_deg;
        match self.profile {
            Profile::HalfSine => a * (PI * u / self.period_s).sin(),
            Profile::LinearRamp => {
                let half = self.period_s / 2.0;
                a * (1.0 - (u - half).abs() / half)
            }
        }
    }

    /// Velocity the rep-analysis pipeline should report for a noiseless
    /// stream: rise from the `rise_threshold·A` crossing to the peak.
    pub fn expected_velocity_dps(&self, rise_threshold: f64) -> f64 {
        let a = self.amplitude_deg;
        let rise = match self.profile {
            Profile::HalfSine => {
                self.period_s / 2.0 - self.period_s / PI * rise_threshold.asin()
            }
            Profile::LinearRamp => self.period_s / 2.0 * (1.0 - rise_threshold),
        };
        a * (1.0 - rise_threshold) / rise
    }

    fn legs(&self, theta_deg: f64) -> LegPose {
        let up = Vector3::y();
        let down = -up;
        let lateral = Vector3::x();
        let fwd = Vector3::z();
        let (plane, sign) = self.exercise.angle_definition();
        let raw = (sign * theta_deg).to_radians();
        let moving = match plane {
            Plane::Sagittal => down * raw.cos() + fwd * raw.sin(),
            Plane::Frontal => {
                let outward = match self.side {
                    Side::Left => -lateral,
                    Side::Right => lateral,
                };
                down * raw.cos() + outward * raw.sin()
            }
        };
        let squat = self.exercise == Exercise::Squat;
        let (left, right) = match (squat, self.side) {
            (true, _) => (moving, moving),
            (false, Side::Left) => (moving, down),
            (false, Side::Right) => (down, moving),
        };
        LegPose { left, right, squat }
    }
}

/// A multi-exercise session for one tracked user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionScript {
    #[serde(default = "default_rate")]
    pub rate_hz: f64,
    #[serde(default)]
    pub start_ms: u64,
    #[serde(default)]
    pub user_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impaired_side: Option<Side>,
    #[serde(default)]
    pub body: BodyModel,
    pub exercises: Vec<ExerciseScript>,
}

fn default_rate() -> f64 {
    DEFAULT_RATE_HZ
}

impl SessionScript {
    /// Parses either a session document or a bare exercise script.
    pub fn from_json(text: &str) -> Result<SessionScript, SynthError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| SynthError::InvalidScript(e.to_string()))?;
        let session = if value.get("exercises").is_some() {
            serde_json::from_value(value)
        } else {
            serde_json::from_value::<ExerciseScript>(value).map(|script| SessionScript {
                rate_hz: DEFAULT_RATE_HZ,
                start_ms: 0,
                user_id: 0,
                impaired_side: None,
                body: BodyModel::default(),
                exercises: vec![script],
            })
        };
        session.map_err(|e| SynthError::InvalidScript(e.to_string()))
    }
}

/// Frames for one exercise block, sampled at `rate_hz` from `start_ms`.
pub fn generate(
    script: &ExerciseScript,
    body: &BodyModel,
    rate_hz: f64,
    user_id: u32,
    start_ms: u64,
) -> Result<Vec<SkeletonFrame>, SynthError> {
    script.validate()?;
    body.validate()?;
    if !(rate_hz > 0.0 && rate_hz <= 1000.0) {
        return Err(SynthError::InvalidScript(format!("rate {rate_hz} Hz")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
    let angle_noise = Normal::new(0.0, script.noise_sd_deg).expect("validated sd");
    let jitter = Normal::new(0.0, script.jitter_sd_m).expect("validated sd");
    let samples = (script.duration_s() * rate_hz).floor() as usize + 1;
    let mut frames = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = k as f64 / rate_hz;
        let mut theta = script.angle_at(t);
        if script.noise_sd_deg > 0.0 {
            theta += angle_noise.sample(&mut rng);
        }
        let mut pose = body.pose(&script.legs(theta));
        if script.jitter_sd_m > 0.0 {
            for p in pose.positions.iter_mut() {
                *p += Vector3::from_fn(|_, _| jitter.sample(&mut rng));
            }
        }
        frames.push(pose.to_frame(user_id, start_ms + sample_offset_ms(k, rate_hz)));
    }
    Ok(frames)
}

/// Frames for all exercise blocks back to back, plus each block's time span.
pub fn generate_session(
    session: &SessionScript,
) -> Result<(Vec<SkeletonFrame>, Vec<(Exercise, Side, u64, u64)>), SynthError> {
    let mut frames: Vec<SkeletonFrame> = Vec::new();
    let mut blocks = Vec::new();
    let mut start = session.start_ms;
    for script in &session.exercises {
        let block = generate(script, &session.body, session.rate_hz, session.user_id, start)?;
        let (first, last) = (block[0].timestamp_ms, block[block.len() - 1].timestamp_ms);
        blocks.push((script.exercise, script.side, first, last));
        start = last + sample_offset_ms(1, session.rate_hz);
        frames.extend(block);
    }
    Ok((frames, blocks))
}
