//! Room state and relay logic, independent of the socket transport.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use bytes::Bytes;
use parking_lot::{Mutex, RwLock};
use serde::Serialize;
use telephyt_core::motion::{EventLabel, LabelKind, Participant, Recording, RecordingHeader, FILE_EXTENSION};
use telephyt_core::wire::{decode_control, decode_frame, encode_control, ControlMessage, ErrorCode, PeerInfo, Role};
use tracing::{debug, info, warn};

use crate::outbox::Outbox;
use crate::{HubConfig, HubError};

/// Token bucket holding up to one second of frames at the configured rate.
#[derive(Debug)]
struct RateLimiter {
    rate: f64,
    tokens: f64,
    last: Instant,
}

impl RateLimiter {
    fn new(rate: f64, now: Instant) -> Self {
        RateLimiter { rate, tokens: rate, last: now }
    }

    fn allow(&mut self, now: Instant) -> bool {
        let elapsed = now.saturating_duration_since(self.last).as_secs_f64();
        self.last = now;
        self.tokens = (self.tokens + elapsed * self.rate).min(self.rate);
        if self.tokens >= 1.0 {
            self.tokens -= 1.0;
            true
        } else {
            false
        }
    }
}

struct Member {
    role: Role,
    display_name: String,
    outbox: Arc<Outbox>,
    limiter: RateLimiter,
    last_timestamp: Option<u64>,
}

impl Member {
    fn peer_info(&self, user_id: u32) -> PeerInfo {
        PeerInfo {
            user_id,
            role: self.role,
            display_name: self.display_name.clone(),
        }
    }
}

struct Room {
    id: String,
    members: BTreeMap<u32, Member>,
    recording: Option<Recording>,
    /// Latest accepted frame timestamp, used to place feedback labels.
    latest_timestamp: Option<u64>,
    empty_since: Option<Instant>,
    frames_relayed: u64,
}

impl Room {
    fn new(id: String, now: Instant) -> Room {
        Room {
            id,
            members: BTreeMap::new(),
            recording: None,
            latest_timestamp: None,
            empty_since: Some(now),
            frames_relayed: 0,
        }
    }

    fn broadcast(&self, except: u32, msg: &ControlMessage) {
        let text = encode_control(msg);
        for (&id, m) in &self.members {
            if id != except {
                m.outbox.push_control(text.clone());
            }
        }
    }

    fn record_participant(&mut self, user_id: u32) {
        let Some(member) = self.members.get(&user_id) else { return };
        if let Some(rec) = self.recording.as_mut() {
            if rec.header.participant(user_id).is_none() {
                rec.header.participants.push(Participant {
                    user_id,
                    role: member.role,
                    display_name: member.display_name.clone(),
                    impaired_side: None,
                });
            }
        }
    }
}

#[derive(Debug, Default)]
pub struct Counters {
    pub frames_relayed: AtomicU64,
    /// Frames over the per-sender rate cap.
    pub frames_rate_limited: AtomicU64,
    /// Frames that failed to decode, carried a foreign user id or went back in time.
    pub frames_rejected: AtomicU64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoomSummary {
    pub room_id: String,
    pub participants: Vec<PeerInfo>,
    pub recording: bool,
    pub frames_relayed: u64,
}

/// Outcome of a recording command, mapped onto control-message error codes.
#[derive(Debug, thiserror::Error)]
pub enum RecordingCommandError {
    #[error("unknown room {0:?}")]
    UnknownRoom(String),
    #[error("in progress")]
    InProgress,
    #[error("not recording")]
    NotRecording,
    #[error(transparent)]
    Write(#[from] HubError),
}

impl RecordingCommandError {
    pub fn code(&self) -> ErrorCode {
        match self {
            RecordingCommandError::UnknownRoom(_) => ErrorCode::NotJoined,
            RecordingCommandError::InProgress => ErrorCode::InProgress,
            RecordingCommandError::NotRecording => ErrorCode::NotRecording,
            RecordingCommandError::Write(_) => ErrorCode::Internal,
        }
    }
}

pub struct Hub {
    config: HubConfig,
    rooms: RwLock<HashMap<String, Arc<Mutex<Room>>>>,
    next_user_id: AtomicU32,
    pub counters: Counters,
}

impl Hub {
    pub fn new(config: HubConfig) -> Result<Arc<Hub>, HubError> {
        config.validate()?;
        Ok(Arc::new(Hub {
            config,
            rooms: RwLock::new(HashMap::new()),
            next_user_id: AtomicU32::new(1),
            counters: Counters::default(),
        }))
    }

    pub fn config(&self) -> &HubConfig {
        &self.config
    }

    /// A transport-facing session for one connection.
    pub fn connect(self: &Arc<Self>) -> Session {
        Session {
            hub: self.clone(),
            outbox: Arc::new(Outbox::new(self.config.queue_depth)),
            joined: None,
        }
    }

    fn room(&self, room_id: &str) -> Option<Arc<Mutex<Room>>> {
        self.rooms.read().get(room_id).cloned()
    }

    pub fn rooms(&self) -> Vec<RoomSummary> {
        let rooms: Vec<_> = self.rooms.read().values().cloned().collect();
        let mut out: Vec<RoomSummary> = rooms
            .iter()
            .map(|r| {
                let r = r.lock();
                RoomSummary {
                    room_id: r.id.clone(),
                    participants: r.members.iter().map(|(&id, m)| m.peer_info(id)).collect(),
                    recording: r.recording.is_some(),
                    frames_relayed: r.frames_relayed,
                }
            })
            .collect();
        out.sort_by(|a, b| a.room_id.cmp(&b.room_id));
        out
    }

    pub fn start_recording(&self, room_id: &str) -> Result<(), RecordingCommandError> {
        let room = self
            .room(room_id)
            .ok_or_else(|| RecordingCommandError::UnknownRoom(room_id.to_string()))?;
        let mut r = room.lock();
        if r.recording.is_some() {
            return Err(RecordingCommandError::InProgress);
        }
        r.recording = Some(Recording::new(RecordingHeader::new(room_id)));
        let ids: Vec<u32> = r.members.keys().copied().collect();
        for id in ids {
            r.record_participant(id);
        }
        info!(room = room_id, "recording started");
        Ok(())
    }

    /// Finalises the room's recording and returns the written file.
    pub fn stop_recording(&self, room_id: &str) -> Result<PathBuf, RecordingCommandError> {
        let room = self
            .room(room_id)
            .ok_or_else(|| RecordingCommandError::UnknownRoom(room_id.to_string()))?;
        let rec = room.lock().recording.take().ok_or(RecordingCommandError::NotRecording)?;
        Ok(self.write_recording(rec)?)
    }

    fn write_recording(&self, mut rec: Recording) -> Result<PathBuf, HubError> {
        // Feedback given before the first or after the last frame has no place
        // on the recording's time axis.
        if let Some((first, last)) = rec.time_range(None) {
            rec.labels.retain(|l| (first..=last).contains(&l.timestamp_ms));
        } else {
            rec.labels.clear();
        }
        let path = recording_path(&self.config.rec_dir, &rec.header.room_id)?;
        rec.save(&path)?;
        info!(room = %rec.header.room_id, frames = rec.frames.len(), path = %path.display(), "recording written");
        Ok(path)
    }

    /// Removes rooms that have been empty for longer than the idle timeout,
    /// finalising any recording they still hold.
    pub fn sweep(&self, now: Instant) -> Vec<PathBuf> {
        let mut rooms = self.rooms.write();
        let idle = self.config.idle_timeout;
        let expired: Vec<String> = rooms
            .iter()
            .filter(|(_, r)| {
                r.lock()
                    .empty_since
                    .is_some_and(|t| now.saturating_duration_since(t) >= idle)
            })
            .map(|(id, _)| id.clone())
            .collect();
        let mut written = Vec::new();
        for id in expired {
            if let Some(room) = rooms.remove(&id) {
                debug!(room = %id, "idle room removed");
                if let Some(rec) = room.lock().recording.take() {
                    match self.write_recording(rec) {
                        Ok(p) => written.push(p),
                        Err(e) => warn!(room = %id, error = %e, "recording lost"),
                    }
                }
            }
        }
        written
    }

    /// Finalises every open recording and disconnects all members.
    pub fn shutdown(&self) -> Vec<PathBuf> {
        let rooms: Vec<_> = self.rooms.write().drain().map(|(_, r)| r).collect();
        let mut written = Vec::new();
        for room in rooms {
            let mut r = room.lock();
            for m in r.members.values() {
                m.outbox.close();
            }
            if let Some(rec) = r.recording.take() {
                match self.write_recording(rec) {
                    Ok(p) => written.push(p),
                    Err(e) => warn!(room = %r.id, error = %e, "recording lost"),
                }
            }
        }
        written
    }
}

fn recording_path(dir: &Path, room_id: &str) -> Result<PathBuf, HubError> {
    std::fs::create_dir_all(dir)?;
    let safe: String = room_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    let millis = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis());
    let mut path = dir.join(format!("{safe}-{millis}.{FILE_EXTENSION}"));
    let mut n = 1;
    while path.exists() {
        path = dir.join(format!("{safe}-{millis}-{n}.{FILE_EXTENSION}"));
        n += 1;
    }
    Ok(path)
}

struct Joined {
    room: Arc<Mutex<Room>>,
    room_id: String,
    user_id: u32,
    role: Role,
}

/// One connection's view of the hub. Replies are queued on [`Session::outbox`].
pub struct Session {
    hub: Arc<Hub>,
    outbox: Arc<Outbox>,
    joined: Option<Joined>,
}

impl Session {
    pub fn outbox(&self) -> Arc<Outbox> {
        self.outbox.clone()
    }

    pub fn user_id(&self) -> Option<u32> {
        self.joined.as_ref().map(|j| j.user_id)
    }

    fn reply(&self, msg: &ControlMessage) {
        self.outbox.push_control(encode_control(msg));
    }

    fn reply_error(&self, code: ErrorCode, detail: impl Into<String>) {
        self.reply(&ControlMessage::Error { code, detail: detail.into() });
    }

    pub fn handle_text(&mut self, text: &str) {
        let msg = match decode_control(text) {
            Ok(m) => m,
            Err(e) => return self.reply_error(ErrorCode::BadMessage, e.to_string()),
        };
        match (msg, self.joined.is_some()) {
            (ControlMessage::Join { room_id, role, display_name }, false) => {
                self.join(room_id, role, display_name)
            }
            (ControlMessage::Join { .. }, true) => self.reply(&ControlMessage::error(ErrorCode::AlreadyJoined)),
            (_, false) => self.reply(&ControlMessage::error(ErrorCode::NotJoined)),
            (ControlMessage::Feedback { text, .. }, true) => self.feedback(text),
            (ControlMessage::MetricUpdate { exercise, side, rep_count, last_peak_deg, last_velocity_dps, .. }, true) => {
                let j = self.joined.as_ref().expect("joined");
                let msg = ControlMessage::MetricUpdate {
                    user_id: j.user_id,
                    exercise,
                    side,
                    rep_count,
                    last_peak_deg,
                    last_velocity_dps,
                };
                j.room.lock().broadcast(j.user_id, &msg);
            }
            (ControlMessage::Leave { .. }, true) => self.leave(),
            (ControlMessage::StartRecording, true) => {
                let room_id = self.joined.as_ref().expect("joined").room_id.clone();
                match self.hub.start_recording(&room_id) {
                    Ok(()) => self.reply(&ControlMessage::RecordingStatus { active: true, path: None }),
                    Err(e) => self.reply_error(e.code(), e.to_string()),
                }
            }
            (ControlMessage::StopRecording, true) => {
                let room_id = self.joined.as_ref().expect("joined").room_id.clone();
                match self.hub.stop_recording(&room_id) {
                    Ok(path) => self.reply(&ControlMessage::RecordingStatus {
                        active: false,
                        path: Some(path.display().to_string()),
                    }),
                    Err(e) => self.reply_error(e.code(), e.to_string()),
                }
            }
            (other, true) => self.reply_error(
                ErrorCode::BadMessage,
                format!("{} is sent by the hub only", other.type_name()),
            ),
        }
    }

    fn join(&mut self, room_id: String, role: Role, display_name: String) {
        let hub = &self.hub;
        let now = Instant::now();
        let mut rooms = hub.rooms.write();
        let room = match rooms.get(&room_id) {
            Some(r) => r.clone(),
            None if rooms.len() >= hub.config.max_rooms => {
                return self.reply(&ControlMessage::error(ErrorCode::Capacity));
            }
            None => {
                let r = Arc::new(Mutex::new(Room::new(room_id.clone(), now)));
                rooms.insert(room_id.clone(), r.clone());
                r
            }
        };
        let mut r = room.lock();
        drop(rooms);
        if role != Role::Observer && r.members.values().any(|m| m.role == role) {
            drop(r);
            return self.reply(&ControlMessage::error(ErrorCode::RoleOccupied));
        }
        let user_id = hub.next_user_id.fetch_add(1, Ordering::Relaxed);
        let peers: Vec<PeerInfo> = r.members.iter().map(|(&id, m)| m.peer_info(id)).collect();
        r.broadcast(
            user_id,
            &ControlMessage::PeerJoined { user_id, role, display_name: display_name.clone() },
        );
        r.members.insert(
            user_id,
            Member {
                role,
                display_name,
                outbox: self.outbox.clone(),
                limiter: RateLimiter::new(hub.config.max_rate_hz, now),
                last_timestamp: None,
            },
        );
        r.empty_since = None;
        r.record_participant(user_id);
        // Queue the ack while holding the room lock so it precedes any relayed frame.
        self.reply(&ControlMessage::JoinAck { user_id, peers });
        drop(r);
        info!(room = %room_id, user_id, %role, "joined");
        self.joined = Some(Joined { room, room_id, user_id, role });
    }

    fn feedback(&self, text: String) {
        let j = self.joined.as_ref().expect("joined");
        let mut r = j.room.lock();
        r.broadcast(j.user_id, &ControlMessage::Feedback { from: j.user_id, text: text.clone() });
        if let (Some(ts), Some(rec)) = (r.latest_timestamp, r.recording.as_mut()) {
            rec.labels.push(EventLabel {
                timestamp_ms: ts,
                kind: LabelKind::Feedback,
                user_id: Some(j.user_id),
                exercise: None,
                side: None,
                text: Some(text),
            });
        }
    }

    pub fn handle_binary(&mut self, packet: Bytes) {
        let Some(j) = self.joined.as_ref() else {
            return self.reply(&ControlMessage::error(ErrorCode::NotJoined));
        };
        if !j.role.may_send_frames() {
            return self.reply(&ControlMessage::error(ErrorCode::ReceiveOnly));
        }
        let counters = &self.hub.counters;
        let frame = match decode_frame(&packet) {
            Ok(f) if f.user_id == j.user_id => f,
            Ok(f) => {
                counters.frames_rejected.fetch_add(1, Ordering::Relaxed);
                return self.reply_error(
                    ErrorCode::BadMessage,
                    format!("frame user_id {} does not match assigned {}", f.user_id, j.user_id),
                );
            }
            Err(e) => {
                counters.frames_rejected.fetch_add(1, Ordering::Relaxed);
                return self.reply_error(ErrorCode::BadMessage, e.to_string());
            }
        };
        let now = Instant::now();
        let mut r = j.room.lock();
        let member = r.members.get_mut(&j.user_id).expect("joined member");
        if member.last_timestamp.is_some_and(|prev| frame.timestamp_ms <= prev) {
            counters.frames_rejected.fetch_add(1, Ordering::Relaxed);
            debug!(user_id = j.user_id, ts = frame.timestamp_ms, "non-increasing timestamp dropped");
            return;
        }
        if !member.limiter.allow(now) {
            counters.frames_rate_limited.fetch_add(1, Ordering::Relaxed);
            return;
        }
        member.last_timestamp = Some(frame.timestamp_ms);
        for (&id, m) in &r.members {
            if id != j.user_id {
                m.outbox.push_frame(j.user_id, packet.clone());
            }
        }
        r.latest_timestamp = Some(r.latest_timestamp.map_or(frame.timestamp_ms, |t| t.max(frame.timestamp_ms)));
        r.frames_relayed += 1;
        if let Some(rec) = r.recording.as_mut() {
            rec.frames.push(frame);
        }
        counters.frames_relayed.fetch_add(1, Ordering::Relaxed);
    }

    /// Leaves the room (explicitly or because the connection dropped).
    pub fn leave(&mut self) {
        let Some(j) = self.joined.take() else { return };
        let mut r = j.room.lock();
        r.members.remove(&j.user_id);
        for m in r.members.values() {
            m.outbox.remove_sender(j.user_id);
        }
        r.broadcast(j.user_id, &ControlMessage::Leave { user_id: j.user_id });
        if r.members.is_empty() {
            r.empty_since = Some(Instant::now());
        }
        info!(room = %j.room_id, user_id = j.user_id, "left");
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        self.leave();
        self.outbox.close();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outbox::Outgoing;
    use std::time::Duration;
    use telephyt_core::motion::SkeletonFrame;
    use telephyt_core::wire::encode_frame;

    fn hub(dir: &Path) -> Arc<Hub> {
        Hub::new(HubConfig {
            rec_dir: dir.to_path_buf(),
            max_rooms: 2,
            max_rate_hz: 1000.0,
            idle_timeout: Duration::from_secs(60),
            ..HubConfig::default()
        })
        .unwrap()
    }

    fn join(s: &mut Session, room: &str, role: Role) -> ControlMessage {
        s.handle_text(&encode_control(&ControlMessage::Join {
            room_id: room.into(),
            role,
            display_name: role.to_string(),
        }));
        next_control(s)
    }

    fn next_control(s: &Session) -> ControlMessage {
        match s.outbox().next().now_or_never() {
            Some(Some(Outgoing::Text(t))) => decode_control(&t).unwrap(),
            other => panic!("expected control, got {other:?}"),
        }
    }

    fn packet(user_id: u32, ts: u64) -> Bytes {
        Bytes::from(encode_frame(&SkeletonFrame::zeroed(user_id, ts)).unwrap().into_vec())
    }

    trait NowOrNever: std::future::Future + Sized {
        fn now_or_never(self) -> Option<Self::Output> {
            let waker = std::task::Waker::noop();
            let mut cx = std::task::Context::from_waker(waker);
            let mut f = std::pin::pin!(self);
            match f.as_mut().poll(&mut cx) {
                std::task::Poll::Ready(v) => Some(v),
                std::task::Poll::Pending => None,
            }
        }
    }
    impl<F: std::future::Future> NowOrNever for F {}

    #[test]
    fn join_rules() {
        let dir = tempfile::tempdir().unwrap();
        let hub = hub(dir.path());
        let mut p = hub.connect();
        assert_eq!(join(&mut p, "a", Role::Patient), ControlMessage::JoinAck { user_id: 1, peers: vec![] });
        let mut t = hub.connect();
        let ControlMessage::JoinAck { peers, .. } = join(&mut t, "a", Role::Therapist) else { panic!() };
        assert_eq!(peers.len(), 1);
        assert!(matches!(next_control(&p), ControlMessage::PeerJoined { role: Role::Therapist, .. }));
        let mut t2 = hub.connect();
        assert_eq!(join(&mut t2, "a", Role::Therapist), ControlMessage::error(ErrorCode::RoleOccupied));
        let mut b = hub.connect();
        join(&mut b, "b", Role::Patient);
        let mut c = hub.connect();
        assert_eq!(join(&mut c, "c", Role::Patient), ControlMessage::error(ErrorCode::Capacity));
        assert_eq!(join(&mut p, "a", Role::Patient), ControlMessage::error(ErrorCode::AlreadyJoined));
    }

    #[test]
    fn relay_order_and_receive_only() {
        let dir = tempfile::tempdir().unwrap();
        let hub = hub(dir.path());
        let mut p = hub.connect();
        join(&mut p, "a", Role::Patient);
        // Alone in the room: nothing to deliver, no error.
        p.handle_binary(packet(1, 1));
        assert_eq!(p.outbox().next().now_or_never(), None);
        let mut o = hub.connect();
        join(&mut o, "a", Role::Observer);
        next_control(&p);
        for ts in 2..5 {
            p.handle_binary(packet(1, ts));
        }
        for ts in 2..5 {
            assert_eq!(o.outbox().next().now_or_never(), Some(Some(Outgoing::Binary(packet(1, ts)))));
        }
        o.handle_binary(packet(2, 9));
        assert_eq!(next_control(&o), ControlMessage::error(ErrorCode::ReceiveOnly));
        // Foreign user id and stale timestamps are rejected.
        p.handle_binary(packet(7, 10));
        assert!(matches!(next_control(&p), ControlMessage::Error { code: ErrorCode::BadMessage, .. }));
        p.handle_binary(packet(1, 3));
        assert_eq!(o.outbox().next().now_or_never(), None);
        assert_eq!(hub.counters.frames_rejected.load(Ordering::Relaxed), 2);
    }

    #[test]
    fn rate_cap_drops_excess() {
        let dir = tempfile::tempdir().unwrap();
        let hub = Hub::new(HubConfig { rec_dir: dir.path().into(), max_rate_hz: 5.0, ..HubConfig::default() }).unwrap();
        let mut p = hub.connect();
        join(&mut p, "a", Role::Patient);
        for ts in 0..20 {
            p.handle_binary(packet(1, ts));
        }
        assert_eq!(hub.counters.frames_relayed.load(Ordering::Relaxed), 5);
        assert_eq!(hub.counters.frames_rate_limited.load(Ordering::Relaxed), 15);
    }

    #[test]
    fn recording_lifecycle() {
        let dir = tempfile::tempdir().unwrap();
        let hub = hub(dir.path());
        let mut p = hub.connect();
        join(&mut p, "room/1", Role::Patient);
        let mut t = hub.connect();
        join(&mut t, "room/1", Role::Therapist);
        next_control(&p);
        assert!(matches!(hub.stop_recording("room/1"), Err(RecordingCommandError::NotRecording)));
        t.handle_text(r#"{"type":"start_recording"}"#);
        assert_eq!(next_control(&t), ControlMessage::RecordingStatus { active: true, path: None });
        assert!(matches!(hub.start_recording("room/1"), Err(RecordingCommandError::InProgress)));
        t.handle_text(r#"{"type":"feedback","from":0,"text":"too early"}"#);
        for ts in 1..=100 {
            p.handle_binary(packet(1, ts));
        }
        t.handle_text(r#"{"type":"feedback","from":0,"text":"straighten trunk"}"#);
        // Recording is silent: the patient only sees the relayed feedback.
        assert_eq!(next_control(&p), ControlMessage::Feedback { from: 2, text: "too early".into() });
        assert_eq!(next_control(&p), ControlMessage::Feedback { from: 2, text: "straighten trunk".into() });
        let path = hub.stop_recording("room/1").unwrap();
        assert!(path.starts_with(dir.path()));
        assert!(path.file_name().unwrap().to_str().unwrap().starts_with("room_1-"));
        let rec = Recording::load(&path).unwrap();
        assert_eq!(rec.frames.len(), 100);
        assert_eq!(rec.header.participants.len(), 2);
        assert_eq!(rec.labels.len(), 1);
        assert_eq!(rec.labels[0].timestamp_ms, 100);
        assert_eq!(rec.labels[0].text.as_deref(), Some("straighten trunk"));
    }

    #[test]
    fn leave_notifies_and_idle_rooms_are_collected() {
        let dir = tempfile::tempdir().unwrap();
        let hub = hub(dir.path());
        let mut p = hub.connect();
        join(&mut p, "a", Role::Patient);
        let mut t = hub.connect();
        join(&mut t, "a", Role::Therapist);
        next_control(&p);
        p.handle_binary(packet(1, 1));
        drop(p);
        // Leave overtakes, and clears, the leaver's queued frames.
        assert_eq!(next_control(&t), ControlMessage::Leave { user_id: 1 });
        assert_eq!(t.outbox().next().now_or_never(), None);
        t.handle_text(r#"{"type":"leave","user_id":0}"#);
        assert_eq!(hub.rooms().len(), 1);
        assert!(hub.sweep(Instant::now()).is_empty());
        assert_eq!(hub.rooms().len(), 1);
        hub.sweep(Instant::now() + Duration::from_secs(61));
        assert!(hub.rooms().is_empty());
    }

    #[test]
    fn messages_before_join_and_hub_only_types() {
        let dir = tempfile::tempdir().unwrap();
        let hub = hub(dir.path());
        let mut s = hub.connect();
        s.handle_binary(packet(1, 1));
        assert_eq!(next_control(&s), ControlMessage::error(ErrorCode::NotJoined));
        s.handle_text(r#"{"type":"dance"}"#);
        assert!(matches!(next_control(&s), ControlMessage::Error { code: ErrorCode::BadMessage, .. }));
        join(&mut s, "a", Role::Patient);
        s.handle_text(r#"{"type":"join_ack","user_id":3,"peers":[]}"#);
        assert!(matches!(next_control(&s), ControlMessage::Error { code: ErrorCode::BadMessage, .. }));
    }
}
