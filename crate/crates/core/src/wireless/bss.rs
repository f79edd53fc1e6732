use std::collections::BTreeMap;
use std::time::Duration;

use super::phy::{Frame, PhyProfile};
use crate::ndn::{MacAddress, NodeId};
use crate::time::SimTime;

/// Result of handing one frame to a BSS medium.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxOutcome {
    /// Start of the first attempt.
    pub start: SimTime,
    /// End of the last attempt; the medium is busy until then.
    pub end: SimTime,
    pub attempts: u32,
    pub airtime: Duration,
    /// Receivers and the instant each got the frame.
    pub deliveries: Vec<(NodeId, SimTime)>,
    /// Unicast frame not acknowledged after all attempts.
    pub lost: bool,
    /// Frame discarded before transmission because the queue was too long.
    pub queue_drop: bool,
}

/// One AP's basic service set on its own channel.
#[derive(Debug, Clone)]
pub struct Bss {
    pub ap: NodeId,
    pub channel: u32,
    members: BTreeMap<NodeId, MacAddress>,
    medium_busy_until: SimTime,
    airtime_total: Duration,
}

impl Bss {
    /// A new BSS whose only member is its AP.
    pub fn new(ap: NodeId, ap_mac: MacAddress, channel: u32) -> Self {
        let mut members = BTreeMap::new();
        members.insert(ap, ap_mac);
        Bss {
            ap,
            channel,
            members,
            medium_busy_until: SimTime::ZERO,
            airtime_total: Duration::ZERO,
        }
    }

    pub fn join(&mut self, node: NodeId, mac: MacAddress) {
        self.members.insert(node, mac);
    }

    pub fn leave(&mut self, node: NodeId) -> bool {
        node != self.ap && self.members.remove(&node).is_some()
    }

    pub fn is_member(&self, node: NodeId) -> bool {
        self.members.contains_key(&node)
    }

    pub fn members(&self) -> impl Iterator<Item = (NodeId, MacAddress)> + '_ {
        self.members.iter().map(|(n, m)| (*n, *m))
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    pub fn medium_busy_until(&self) -> SimTime {
        self.medium_busy_until
    }

    /// Total airtime charged on this medium so far.
    pub fn airtime_total(&self) -> Duration {
        self.airtime_total
    }

    /// Queues `frame` from `sender` behind whatever occupies the medium.
    ///
    /// `in_range(a, b)` says whether `b` can hear `a`. `lose()` draws one
    /// Bernoulli trial per receiver per attempt; true means that copy is lost.
    pub fn transmit(
        &mut self,
        sender: NodeId,
        frame: &Frame,
        now: SimTime,
        profile: &PhyProfile,
        in_range: impl Fn(NodeId, NodeId) -> bool,
        mut lose: impl FnMut() -> bool,
    ) -> TxOutcome {
        debug_assert!(self.is_member(sender), "sender {sender} is not in BSS of {}", self.ap);
        let start = self.medium_busy_until.max(now);
        if let Some(limit) = profile.max_queue_delay() {
            if start.saturating_since(now) > limit {
                return TxOutcome {
                    start,
                    end: start,
                    attempts: 0,
                    airtime: Duration::ZERO,
                    deliveries: Vec::new(),
                    lost: false,
                    queue_drop: true,
                };
            }
        }
        let per_attempt = frame.attempt_airtime(profile);
        let mut deliveries = Vec::new();
        let mut attempts = 0;
        let mut lost = false;

        if frame.is_broadcast() {
            attempts = 1;
            let at = start + per_attempt;
            for &node in self.members.keys() {
                if node != sender && in_range(sender, node) && !lose() {
                    deliveries.push((node, at));
                }
            }
        } else {
            let target = self
                .members
                .iter()
                .find(|(_, m)| **m == frame.dst)
                .map(|(n, _)| *n)
                .filter(|&n| n != sender && in_range(sender, n));
            let mut t = start;
            loop {
                attempts += 1;
                t += per_attempt;
                // an absent receiver never acknowledges, so skip the draw
                if let Some(node) = target {
                    if !lose() {
                        deliveries.push((node, t));
                        break;
                    }
                }
                if attempts > profile.retry_limit {
                    lost = true;
                    break;
                }
            }
        }
        let airtime = per_attempt * attempts;
        let end = start + airtime;
        self.medium_busy_until = end;
        self.airtime_total += airtime;
        TxOutcome {
            start,
            end,
            attempts,
            airtime,
            deliveries,
            lost,
            queue_drop: false,
        }
    }
}
