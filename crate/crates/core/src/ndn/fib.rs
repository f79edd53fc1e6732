use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use super::face::FaceId;
use super::name::{Component, Name};
use super::packet::MacAddress;
use crate::time::SimTime;

/// MAC learned on a next-hop face, with the last time it was observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LearnedMac {
    pub mac: MacAddress,
    pub last_seen: SimTime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NextHop {
    pub face: FaceId,
    pub cost: u32,
    /// Neighbours that returned data through this face, most recent first.
    pub learned_macs: Vec<LearnedMac>,
}

impl NextHop {
    pub fn new(face: FaceId, cost: u32) -> Self {
        NextHop {
            face,
            cost,
            learned_macs: Vec::new(),
        }
    }

    /// Records an observation of `mac`, moving it to the front.
    pub fn learn(&mut self, mac: MacAddress, now: SimTime) {
        self.learned_macs.retain(|m| m.mac != mac);
        self.learned_macs.insert(0, LearnedMac { mac, last_seen: now });
    }

    /// Drops entries not observed within `ttl` of `now`.
    pub fn evict_stale(&mut self, now: SimTime, ttl: Duration) {
        self.learned_macs.retain(|m| now.saturating_since(m.last_seen) < ttl);
    }

    /// Live learned MACs, most recently seen first.
    pub fn live_macs(&self, now: SimTime, ttl: Duration) -> Vec<MacAddress> {
        self.learned_macs
            .iter()
            .filter(|m| now.saturating_since(m.last_seen) < ttl)
            .map(|m| m.mac)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibEntry {
    pub prefix: Name,
    pub next_hops: Vec<NextHop>,
}

impl FibEntry {
    pub fn next_hop_mut(&mut self, face: FaceId) -> Option<&mut NextHop> {
        self.next_hops.iter_mut().find(|nh| nh.face == face)
    }
}

/// Forwarding Information Base with longest-prefix-match lookup.
///
/// Lookup probes each prefix length of the name from longest to shortest,
/// so its cost is bounded by the name length, not the table size.
#[derive(Debug, Clone, Default)]
pub struct Fib {
    entries: BTreeMap<Arc<[Component]>, FibEntry>,
}

impl Fib {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds (or updates the cost of) a next hop for `prefix`.
    pub fn add_route(&mut self, prefix: Name, face: FaceId, cost: u32) {
        let entry = self.entries.entry(prefix.shared_components().clone()).or_insert_with(|| FibEntry {
            prefix,
            next_hops: Vec::new(),
        });
        match entry.next_hop_mut(face) {
            Some(nh) => nh.cost = cost,
            None => entry.next_hops.push(NextHop::new(face, cost)),
        }
        entry.next_hops.sort_by_key(|nh| (nh.cost, nh.face));
    }

    pub fn get(&self, prefix: &Name) -> Option<&FibEntry> {
        self.entries.get(prefix.components())
    }

    pub fn longest_prefix_match(&self, name: &Name) -> Option<&FibEntry> {
        let key = self.lpm_key(name)?;
        self.entries.get(key)
    }

    pub fn longest_prefix_match_mut(&mut self, name: &Name) -> Option<&mut FibEntry> {
        let len = self.lpm_key(name)?.len();
        self.entries.get_mut(name.prefix(len))
    }

    fn lpm_key<'a>(&self, name: &'a Name) -> Option<&'a [Component]> {
        (0..=name.len())
            .rev()
            .map(|n| name.prefix(n))
            .find(|p| self.entries.contains_key(*p))
    }

    pub fn iter(&self) -> impl Iterator<Item = &FibEntry> {
        self.entries.values()
    }

    /// Clears every learned MAC on next hops using `face`.
    pub fn forget_macs_on(&mut self, face: FaceId) {
        for entry in self.entries.values_mut() {
            if let Some(nh) = entry.next_hop_mut(face) {
                nh.learned_macs.clear();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    #[test]
    fn longest_prefix_wins() {
        let mut fib = Fib::new();
        fib.add_route(n("/p"), FaceId(1), 0);
        fib.add_route(n("/p/v7"), FaceId(2), 0);
        assert_eq!(fib.longest_prefix_match(&n("/p/v7/1")).unwrap().prefix, n("/p/v7"));
        assert_eq!(fib.longest_prefix_match(&n("/p/v8/1")).unwrap().prefix, n("/p"));
    }

    #[test]
    fn miss_without_covering_prefix() {
        let mut fib = Fib::new();
        fib.add_route(n("/q"), FaceId(1), 0);
        assert!(fib.longest_prefix_match(&n("/p/x")).is_none());
    }

    #[test]
    fn root_is_default_route() {
        let mut fib = Fib::new();
        fib.add_route(Name::root(), FaceId(1), 0);
        assert_eq!(fib.longest_prefix_match(&n("/anything/at/all")).unwrap().prefix, Name::root());
    }

    #[test]
    fn next_hops_sorted_by_cost() {
        let mut fib = Fib::new();
        fib.add_route(n("/p"), FaceId(1), 10);
        fib.add_route(n("/p"), FaceId(2), 5);
        let e = fib.get(&n("/p")).unwrap();
        assert_eq!(e.next_hops[0].face, FaceId(2));
    }

    #[test]
    fn learned_macs_age_out() {
        let mut nh = NextHop::new(FaceId(0), 0);
        let ttl = Duration::from_secs(2);
        nh.learn(MacAddress::local(1), SimTime::from_secs_f64(0.0));
        nh.learn(MacAddress::local(2), SimTime::from_secs_f64(1.0));
        assert_eq!(
            nh.live_macs(SimTime::from_secs_f64(1.5), ttl),
            vec![MacAddress::local(2), MacAddress::local(1)]
        );
        assert_eq!(nh.live_macs(SimTime::from_secs_f64(2.0), ttl), vec![MacAddress::local(2)]);
        nh.learn(MacAddress::local(1), SimTime::from_secs_f64(2.5));
        assert_eq!(nh.live_macs(SimTime::from_secs_f64(2.6), ttl)[0], MacAddress::local(1));
        nh.evict_stale(SimTime::from_secs_f64(4.2), ttl);
        assert_eq!(nh.learned_macs.len(), 1);
    }
}
