use std::time::Duration;

use crate::time::SimTime;

/// Point-to-point wired link, FIFO and independent in each direction.
#[derive(Debug, Clone)]
pub struct WiredLink {
    pub rate_bps: f64,
    pub delay: Duration,
    busy_until: [SimTime; 2],
}

impl WiredLink {
    pub fn new(rate_bps: f64, delay: Duration) -> Self {
        WiredLink {
            rate_bps,
            delay,
            busy_until: [SimTime::ZERO; 2],
        }
    }

    pub fn serialization(&self, size_bytes: usize) -> Duration {
        Duration::from_nanos(((size_bytes as f64 * 8.0 / self.rate_bps) * 1e9).round() as u64)
    }

    /// Arrival time of a packet sent in `direction` (0 or 1) at `now`.
    pub fn send(&mut self, direction: usize, size_bytes: usize, now: SimTime) -> SimTime {
        let start = self.busy_until[direction].max(now);
        let done = start + self.serialization(size_bytes);
        self.busy_until[direction] = done;
        done + self.delay
    }
}
