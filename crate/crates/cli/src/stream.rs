//! Live producers: the motion simulator and the recording replayer.

use std::collections::BTreeMap;
use std::fs;
use std::time::Duration;

use telephyt_core::motion::{EventLabel, LabelKind, Participant, Recording, RecordingHeader, SkeletonFrame};
use telephyt_core::synth::{generate_session, replay_schedule, SessionScript};
use telephyt_core::wire::{ControlMessage, Role};
use telephyt_hub::client::{unix_millis, ClientReceiver, Event, HubClient};
use tokio::time::Instant;
use tracing::{debug, info, warn};

use crate::analyze::load_recording;
use crate::args::{ReplayArgs, SimulateArgs};
use crate::error::CliError;

fn check_speed(speed: f64) -> Result<(), CliError> {
    if speed > 0.0 && speed.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("speed must be positive, got {speed}")))
    }
}

/// Renders a script as a recording of a single participant.
pub fn simulated_recording(session: &SessionScript, room: &str, role: Role, name: &str) -> Result<Recording, CliError> {
    let (frames, _) = generate_session(session).map_err(CliError::data)?;
    let mut header = RecordingHeader::new(room);
    header.capture_rate_hz = session.rate_hz;
    header.participants.push(Participant {
        user_id: session.user_id,
        role,
        display_name: name.to_string(),
        impaired_side: session.impaired_side,
    });
    for s in &session.exercises {
        if !header.exercises.contains(&s.exercise) {
            header.exercises.push(s.exercise);
        }
    }
    Ok(Recording { header, frames, labels: Vec::new() })
}

/// Keeps the socket drained and surfaces what peers say.
async fn drain(mut rx: ClientReceiver, name: String) {
    loop {
        match rx.next_event().await {
            Ok(Event::Control(ControlMessage::Feedback { from, text })) => info!(%name, from, %text, "feedback"),
            Ok(Event::Control(msg)) => debug!(%name, ?msg, "control"),
            Ok(Event::Frame { .. }) => {}
            Err(_) => return,
        }
    }
}

pub async fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    check_speed(args.speed)?;
    if !args.role.may_send_frames() {
        return Err(CliError::Usage(format!("a {} cannot send frames", args.role)));
    }
    let text = fs::read_to_string(&args.script).map_err(|e| CliError::Usage(format!("{}: {e}", args.script.display())))?;
    let session = SessionScript::from_json(&text).map_err(|e| CliError::in_file(&args.script, e))?;
    let rec = simulated_recording(&session, &args.room, args.role, &args.name)?;

    if let Some(path) = &args.out {
        rec.save(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        info!(path = %path.display(), frames = rec.frames.len(), "recording written");
        return Ok(());
    }
    let url = args.connect.as_deref().expect("clap enforces --connect or --out");
    let client = HubClient::join(url, &args.room, args.role, &args.name).await?;
    info!(user_id = client.user_id, room = %args.room, frames = rec.frames.len(), "streaming simulated motion");
    let (mut tx, rx) = client.split();
    let drainer = tokio::spawn(drain(rx, args.name.clone()));
    let sent = tx.stream_recording(&rec, args.speed).await?;
    let _ = tx.close().await;
    drainer.abort();
    info!(sent, "simulation finished");
    Ok(())
}

/// What one replayed participant sends, with offsets from replay start.
#[derive(Default)]
struct Track {
    frames: Vec<(Duration, SkeletonFrame)>,
    feedback: Vec<(Duration, String)>,
}

pub async fn replay(args: &ReplayArgs) -> Result<(), CliError> {
    check_speed(args.speed)?;
    let rec = load_recording(&args.recording)?;
    let room = args.room.clone().unwrap_or_else(|| rec.header.room_id.clone());
    let schedule = replay_schedule(&rec, args.speed, unix_millis()).map_err(CliError::data)?;
    let first_ms = rec.frames.iter().map(|f| f.timestamp_ms).min().expect("non-empty recording");

    let mut tracks: BTreeMap<u32, Track> = BTreeMap::new();
    for item in schedule {
        tracks.entry(item.frame.user_id).or_default().frames.push((item.at, item.frame));
    }
    for label in rec.labels.iter().filter(|l| l.kind == LabelKind::Feedback) {
        if let EventLabel { user_id: Some(author), text: Some(text), .. } = label {
            let at = Duration::from_secs_f64(label.timestamp_ms.saturating_sub(first_ms) as f64 / 1000.0 / args.speed);
            tracks.entry(*author).or_default().feedback.push((at, text.clone()));
        }
    }

    // Patients join first so a recorded therapist never takes their place.
    let role_of = |id: u32| rec.header.participant(id).map_or(Role::Patient, |p| p.role);
    let mut order: Vec<u32> = tracks.keys().copied().collect();
    order.sort_by_key(|&id| (role_of(id) != Role::Patient, id));

    let mut joined = Vec::new();
    for id in order {
        let role = role_of(id);
        let mut track = tracks.remove(&id).expect("listed user");
        if !role.may_send_frames() && !track.frames.is_empty() {
            warn!(user_id = id, %role, "receive-only participant; frames skipped");
            track.frames.clear();
        }
        let name = rec
            .header
            .participant(id)
            .map_or_else(|| format!("user {id}"), |p| p.display_name.clone());
        let client = HubClient::join(&args.connect, &room, role, &name).await?;
        info!(recorded = id, assigned = client.user_id, %role, frames = track.frames.len(), "joined for replay");
        joined.push((client, track, name));
    }

    let start = Instant::now();
    let mut tasks = Vec::new();
    for (client, track, name) in joined {
        let (mut tx, rx) = client.split();
        let drainer = tokio::spawn(drain(rx, name));
        tasks.push(tokio::spawn(async move {
            let mut frames = track.frames.into_iter().peekable();
            let mut feedback = track.feedback.into_iter().peekable();
            let mut sent = 0usize;
            loop {
                let next_frame = frames.peek().map(|(at, _)| *at);
                let next_feedback = feedback.peek().map(|(at, _)| *at);
                match (next_frame, next_feedback) {
                    (None, None) => break,
                    (Some(f), b) if b.is_none_or(|b| f <= b) => {
                        let (at, frame) = frames.next().expect("peeked");
                        tokio::time::sleep_until(start + at).await;
                        tx.send_frame(&frame).await?;
                        sent += 1;
                    }
                    _ => {
                        let (at, text) = feedback.next().expect("peeked");
                        tokio::time::sleep_until(start + at).await;
                        tx.send_control(&ControlMessage::Feedback { from: 0, text }).await?;
                    }
                }
            }
            let _ = tx.close().await;
            drainer.abort();
            Ok::<usize, CliError>(sent)
        }));
    }
    let mut total = 0;
    for t in tasks {
        total += t.await.map_err(CliError::usage)??;
    }
    info!(frames = total, "replay finished");
    Ok(())
}
