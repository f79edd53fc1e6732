use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::ndn::{MacAddress, Packet};

/// Link-layer parameters shared by every BSS in a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhyProfile {
    /// Rate of individually addressed frames, bit/s.
    pub unicast_rate_bps: f64,
    /// Rate of group-addressed frames, bit/s.
    pub basic_rate_bps: f64,
    /// Preamble, inter-frame spacing and mean backoff, charged per attempt.
    pub per_frame_overhead_us: f64,
    /// SIFS plus ACK, charged per unicast attempt.
    pub ack_overhead_us: f64,
    pub retry_limit: u32,
    pub range_m: f64,
    /// MAC header plus FCS added to every payload.
    pub header_bytes: usize,
    /// Independent loss probability of each frame attempt at each receiver.
    pub attempt_loss: f64,
    /// Frames that would wait longer than this for the medium are dropped.
    /// Zero disables the limit.
    pub max_queue_delay_ms: f64,
    /// A station hands over only when another AP is at least this much closer.
    pub hysteresis_m: f64,
}

impl Default for PhyProfile {
    fn default() -> Self {
        PhyProfile {
            unicast_rate_bps: 143.4e6,
            basic_rate_bps: 6e6,
            per_frame_overhead_us: 60.0,
            ack_overhead_us: 50.0,
            retry_limit: 7,
            range_m: 80.0,
            header_bytes: 36,
            attempt_loss: 0.0,
            max_queue_delay_ms: 0.0,
            hysteresis_m: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhyError {
    #[error("phy.{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

impl PhyProfile {
    pub fn per_frame_overhead(&self) -> Duration {
        Duration::from_secs_f64(self.per_frame_overhead_us * 1e-6)
    }

    pub fn ack_overhead(&self) -> Duration {
        Duration::from_secs_f64(self.ack_overhead_us * 1e-6)
    }

    pub fn max_queue_delay(&self) -> Option<Duration> {
        (self.max_queue_delay_ms > 0.0).then(|| Duration::from_secs_f64(self.max_queue_delay_ms * 1e-3))
    }

    pub fn validate(&self) -> Result<(), PhyError> {
        let bad = |field, reason: &str| {
            Err(PhyError::Invalid {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.basic_rate_bps > 0.0 && self.basic_rate_bps.is_finite()) {
            return bad("basic_rate_bps", "must be positive");
        }
        if !(self.unicast_rate_bps > self.basic_rate_bps && self.unicast_rate_bps.is_finite()) {
            return bad("unicast_rate_bps", "must exceed basic_rate_bps");
        }
        if !(self.per_frame_overhead_us >= 0.0 && self.ack_overhead_us >= 0.0) {
            return bad("per_frame_overhead_us", "overheads must be non-negative");
        }
        if !(self.range_m > 0.0) {
            return bad("range_m", "must be positive");
        }
        if !(0.0..1.0).contains(&self.attempt_loss) {
            return bad("attempt_loss", "must be in [0, 1)");
        }
        if !(self.max_queue_delay_ms >= 0.0) {
            return bad("max_queue_delay_ms", "must be non-negative");
        }
        if !(self.hysteresis_m >= 0.0) {
            return bad("hysteresis_m", "must be non-negative");
        }
        Ok(())
    }
}

/// Time on air of one attempt: fixed overhead plus serialization.
/// Acknowledgement time is not included; see [`Frame::attempt_airtime`].
pub fn airtime(size_bytes: usize, rate_bps: f64, profile: &PhyProfile) -> Duration {
    assert!(rate_bps > 0.0, "rate must be positive");
    let secs = profile.per_frame_overhead_us * 1e-6 + (size_bytes as f64 * 8.0) / rate_bps;
    Duration::from_nanos((secs * 1e9).round() as u64)
}

/// One link-layer unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub src: MacAddress,
    pub dst: MacAddress,
    pub payload: Packet,
    pub size: usize,
}

impl Frame {
    pub fn new(src: MacAddress, dst: MacAddress, payload: Packet, profile: &PhyProfile) -> Self {
        let size = payload.wire_size() + profile.header_bytes;
        Frame { src, dst, payload, size }
    }

    pub fn is_broadcast(&self) -> bool {
        self.dst.is_broadcast()
    }

    /// Airtime charged per attempt: basic rate without ACK for broadcast,
    /// unicast rate plus ACK otherwise.
    pub fn attempt_airtime(&self, profile: &PhyProfile) -> Duration {
        if self.is_broadcast() {
            airtime(self.size, profile.basic_rate_bps, profile)
        } else {
            airtime(self.size, profile.unicast_rate_bps, profile) + profile.ack_overhead()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndn::{Data, Interest, Name};

    fn bare() -> PhyProfile {
        PhyProfile {
            per_frame_overhead_us: 0.0,
            ack_overhead_us: 0.0,
            ..PhyProfile::default()
        }
    }

    #[test]
    fn serialization_time_by_hand() {
        assert_eq!(airtime(1500, 6e6, &bare()), Duration::from_millis(2));
        let t = airtime(1024, 143.4e6, &bare()).as_secs_f64();
        assert!((t - 57.1e-6).abs() < 0.05e-6, "{t}");
    }

    #[test]
    fn empty_frame_costs_overhead_only() {
        let p = PhyProfile::default();
        assert_eq!(airtime(0, 6e6, &p), Duration::from_micros(60));
    }

    #[test]
    fn broadcast_longer_than_unicast() {
        let p = PhyProfile::default();
        let name: Name = "/veh/1/1".parse().unwrap();
        for payload in [
            Packet::Interest(Interest::new(name.clone(), 1)),
            Packet::Data(Data::new(name.clone(), 1024)),
        ] {
            let b = Frame::new(MacAddress::local(1), MacAddress::BROADCAST, payload.clone(), &p);
            let u = Frame::new(MacAddress::local(1), MacAddress::local(2), payload, &p);
            assert_eq!(b.size, u.size);
            assert!(b.attempt_airtime(&p) > u.attempt_airtime(&p));
        }
    }

    #[test]
    fn validation_catches_inverted_rates() {
        let p = PhyProfile {
            basic_rate_bps: 200e6,
            ..PhyProfile::default()
        };
        assert!(p.validate().is_err());
        assert!(PhyProfile::default().validate().is_ok());
    }
}
