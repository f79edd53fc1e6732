use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::packet::MacAddress;

/// Link-layer addressing policy of a Native NDN deployment: which packet
/// directions may use unicast frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeploymentMode {
    /// Broadcast in both directions.
    Standard,
    /// Unicast interests, broadcast data.
    Up,
    /// Broadcast interests, unicast data.
    Down,
    /// Unicast in both directions.
    Proposal,
}

impl DeploymentMode {
    pub const ALL: [DeploymentMode; 4] = [
        DeploymentMode::Standard,
        DeploymentMode::Up,
        DeploymentMode::Down,
        DeploymentMode::Proposal,
    ];

    pub fn from_flags(up_unicast: bool, down_unicast: bool) -> Self {
        match (up_unicast, down_unicast) {
            (false, false) => DeploymentMode::Standard,
            (true, false) => DeploymentMode::Up,
            (false, true) => DeploymentMode::Down,
            (true, true) => DeploymentMode::Proposal,
        }
    }

    pub fn up_unicast(self) -> bool {
        matches!(self, DeploymentMode::Up | DeploymentMode::Proposal)
    }

    pub fn down_unicast(self) -> bool {
        matches!(self, DeploymentMode::Down | DeploymentMode::Proposal)
    }

    pub fn unicast(self, direction: Direction) -> bool {
        match direction {
            Direction::Up => self.up_unicast(),
            Direction::Down => self.down_unicast(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DeploymentMode::Standard => "Standard",
            DeploymentMode::Up => "Up",
            DeploymentMode::Down => "Down",
            DeploymentMode::Proposal => "Proposal",
        }
    }
}

impl fmt::Display for DeploymentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DeploymentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(DeploymentMode::Standard),
            "up" => Ok(DeploymentMode::Up),
            "down" => Ok(DeploymentMode::Down),
            "proposal" => Ok(DeploymentMode::Proposal),
            other => Err(format!("unknown deployment {other:?} (expected standard, up, down or proposal)")),
        }
    }
}

/// Interests travel up toward producers, data travels down toward consumers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

/// Link-layer destination(s) chosen for one network-layer send.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameDestination {
    Broadcast,
    /// One unicast frame per address, in order.
    Unicast(Vec<MacAddress>),
}

impl FrameDestination {
    /// Destination MACs of the frames to emit.
    pub fn addresses(&self) -> Vec<MacAddress> {
        match self {
            FrameDestination::Broadcast => vec![MacAddress::BROADCAST],
            FrameDestination::Unicast(v) => v.clone(),
        }
    }
}

/// Picks frame destinations for a send on a wireless face.
///
/// `candidates` are the learned MACs relevant to the send: the in-record's
/// senders for data, the next hop's learned MACs (most recent first) for
/// interests. With the direction's unicast flag off, or nothing learned yet,
/// the frame is broadcast.
pub fn select_frame_destination(direction: Direction, mode: DeploymentMode, candidates: &[MacAddress]) -> FrameDestination {
    if !mode.unicast(direction) || candidates.is_empty() {
        return FrameDestination::Broadcast;
    }
    match direction {
        Direction::Up => FrameDestination::Unicast(vec![candidates[0]]),
        Direction::Down => {
            let mut out: Vec<MacAddress> = Vec::with_capacity(candidates.len());
            for &m in candidates {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
            FrameDestination::Unicast(out)
        }
    }
}
