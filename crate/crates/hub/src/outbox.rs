//! Per-connection outgoing queue.
//!
//! Control messages are never dropped. Frames are queued per sender with a
//! bounded depth; when a receiver falls behind, the sender's oldest queued
//! frame is discarded so the receiver always converges on fresh poses.
//! Senders are served round-robin, so one busy stream cannot starve another.

use std::collections::VecDeque;

use bytes::Bytes;
use parking_lot::Mutex;
use tokio::sync::Notify;

#[derive(Debug, Clone, PartialEq)]
pub enum Outgoing {
    Text(String),
    Binary(Bytes),
}

#[derive(Default)]
struct State {
    control: VecDeque<String>,
    frames: Vec<(u32, VecDeque<Bytes>)>,
    next_sender: usize,
    dropped: u64,
    closed: bool,
}

pub struct Outbox {
    state: Mutex<State>,
    notify: Notify,
    depth: usize,
}

impl Outbox {
    pub fn new(depth: usize) -> Outbox {
        Outbox {
            state: Mutex::new(State::default()),
            notify: Notify::new(),
            depth: depth.max(1),
        }
    }

    pub fn push_control(&self, text: String) {
        let mut s = self.state.lock();
        if s.closed {
            return;
        }
        s.control.push_back(text);
        drop(s);
        self.notify.notify_one();
    }

    /// Queues a frame from `sender`; returns `false` if an older frame was dropped.
    pub fn push_frame(&self, sender: u32, packet: Bytes) -> bool {
        let mut s = self.state.lock();
        if s.closed {
            return true;
        }
        let depth = self.depth;
        let queue = match s.frames.iter().position(|(id, _)| *id == sender) {
            Some(i) => &mut s.frames[i].1,
            None => {
                s.frames.push((sender, VecDeque::new()));
                &mut s.frames.last_mut().expect("just pushed").1
            }
        };
        let overflow = queue.len() >= depth;
        if overflow {
            queue.pop_front();
        }
        queue.push_back(packet);
        if overflow {
            s.dropped += 1;
        }
        drop(s);
        self.notify.notify_one();
        !overflow
    }

    /// Forgets queued frames of a sender that left.
    pub fn remove_sender(&self, sender: u32) {
        self.state.lock().frames.retain(|(id, _)| *id != sender);
    }

    pub fn dropped(&self) -> u64 {
        self.state.lock().dropped
    }

    /// Pending control messages are still delivered; then `next` returns `None`.
    pub fn close(&self) {
        self.state.lock().closed = true;
        self.notify.notify_one();
    }

    fn try_next(&self) -> Option<Option<Outgoing>> {
        let mut s = self.state.lock();
        if let Some(text) = s.control.pop_front() {
            return Some(Some(Outgoing::Text(text)));
        }
        let n = s.frames.len();
        for k in 0..n {
            let i = (s.next_sender + k) % n;
            if let Some(packet) = s.frames[i].1.pop_front() {
                s.next_sender = (i + 1) % n;
                return Some(Some(Outgoing::Binary(packet)));
            }
        }
        if s.closed {
            return Some(None);
        }
        None
    }

    /// Waits for the next message; `None` once closed and drained of control.
    pub async fn next(&self) -> Option<Outgoing> {
        loop {
            if let Some(item) = self.try_next() {
                return item;
            }
            self.notify.notified().await;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(v: u8) -> Bytes {
        Bytes::from(vec![v])
    }

    #[tokio::test]
    async fn control_first_then_round_robin() {
        let out = Outbox::new(4);
        out.push_frame(1, frame(10));
        out.push_frame(1, frame(11));
        out.push_frame(2, frame(20));
        out.push_control("hello".into());
        assert_eq!(out.next().await, Some(Outgoing::Text("hello".into())));
        assert_eq!(out.next().await, Some(Outgoing::Binary(frame(10))));
        assert_eq!(out.next().await, Some(Outgoing::Binary(frame(20))));
        assert_eq!(out.next().await, Some(Outgoing::Binary(frame(11))));
    }

    #[tokio::test]
    async fn slow_receiver_keeps_newest_frames_in_order() {
        let out = Outbox::new(3);
        for v in 0..10 {
            out.push_frame(7, frame(v));
        }
        assert_eq!(out.dropped(), 7);
        for v in 7..10 {
            assert_eq!(out.next().await, Some(Outgoing::Binary(frame(v))));
        }
        out.push_control("bye".into());
        out.close();
        assert_eq!(out.next().await, Some(Outgoing::Text("bye".into())));
        assert_eq!(out.next().await, None);
    }

    #[tokio::test]
    async fn waiting_reader_is_woken() {
        let out = std::sync::Arc::new(Outbox::new(2));
        let reader = {
            let out = out.clone();
            tokio::spawn(async move { out.next().await })
        };
        tokio::task::yield_now().await;
        out.push_frame(3, frame(1));
        assert_eq!(reader.await.unwrap(), Some(Outgoing::Binary(frame(1))));
    }
}
