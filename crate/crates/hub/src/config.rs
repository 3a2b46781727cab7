use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use crate::HubError;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";
pub const DEFAULT_MAX_ROOMS: usize = 64;
pub const DEFAULT_MAX_RATE_HZ: f64 = 60.0;
pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(60);
/// Frames buffered per sender for one slow receiver before the oldest is dropped.
pub const DEFAULT_QUEUE_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct HubConfig {
    pub listen: SocketAddr,
    pub max_rooms: usize,
    /// Per-sender frame rate cap; excess frames are dropped and counted.
    pub max_rate_hz: f64,
    pub rec_dir: PathBuf,
    /// Empty rooms are removed after this long.
    pub idle_timeout: Duration,
    pub queue_depth: usize,
    /// Directory served at `/` (the browser client), if any.
    pub static_dir: Option<PathBuf>,
}

impl Default for HubConfig {
    fn default() -> Self {
        HubConfig {
            listen: DEFAULT_LISTEN.parse().expect("valid default address"),
            max_rooms: DEFAULT_MAX_ROOMS,
            max_rate_hz: DEFAULT_MAX_RATE_HZ,
            rec_dir: PathBuf::from("recordings"),
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
            queue_depth: DEFAULT_QUEUE_DEPTH,
            static_dir: None,
        }
    }
}

impl HubConfig {
    pub fn validate(&self) -> Result<(), HubError> {
        if !(self.max_rate_hz >= 1.0 && self.max_rate_hz.is_finite()) {
            return Err(HubError::Config(format!("max rate must be at least 1 Hz, got {}", self.max_rate_hz)));
        }
        if self.max_rooms == 0 || self.queue_depth == 0 {
            return Err(HubError::Config("max rooms and queue depth must be positive".into()));
        }
        Ok(())
    }
}
