//! Interest/Data forwarding pipeline with passive MAC learning.
//!
//! Interests record the frame source in the PIT in-record of the incoming
//! face; Data records its frame source on the FIB next hop it came through.
//! The pipeline itself never picks link-layer destinations: it hands the
//! learned candidates to the caller inside each [`ForwardAction`], and the
//! caller applies the deployment's addressing policy.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::time::Duration;

use rustc_hash::FxHashSet as HashSet;
use serde::Serialize;

use super::cs::ContentStore;
use super::face::{Face, FaceId, FaceKind, NodeId};
use super::fib::Fib;
use super::name::Name;
use super::packet::{Data, Interest, MacAddress};
use super::pit::{Pit, PitEntry};
use crate::time::SimTime;

#[derive(Debug, Clone)]
pub struct ForwarderConfig {
    pub cs_capacity: usize,
    pub pit_capacity: Option<usize>,
    /// How long a learned next-hop MAC stays usable without being refreshed.
    pub mac_ttl: Duration,
    /// How long consumed (name, nonce) pairs are remembered for loop detection.
    pub dead_nonce_lifetime: Duration,
}

impl Default for ForwarderConfig {
    fn default() -> Self {
        ForwarderConfig {
            cs_capacity: 0,
            pit_capacity: None,
            mac_ttl: Duration::from_secs(2),
            dead_nonce_lifetime: Duration::from_secs(6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DropReason {
    DuplicateNonce,
    NoRoute,
    Unsolicited,
    MalformedName,
    PitOverflow,
    UnknownFace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForwardAction {
    SendInterest {
        face: FaceId,
        interest: Interest,
        /// Learned MACs of the chosen next hop, most recent first.
        candidates: Vec<MacAddress>,
    },
    SendData {
        face: FaceId,
        data: Data,
        /// Frame sources recorded on the satisfied in-record.
        candidates: Vec<MacAddress>,
    },
    Drop(DropReason),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ForwarderCounters {
    /// Every packet that entered the pipeline, solicited or not.
    pub packets_processed: u64,
    pub interests_in: u64,
    pub data_in: u64,
    pub interests_forwarded: u64,
    pub data_sent: u64,
    pub aggregated: u64,
    pub duplicates: u64,
    pub no_route: u64,
    pub unsolicited: u64,
    pub protocol_errors: u64,
    pub pit_overflow: u64,
    pub cs_hits: u64,
    pub cs_misses: u64,
    pub satisfied: u64,
    pub unsatisfied: u64,
}

/// Recently consumed (name, nonce) pairs.
#[derive(Debug, Clone, Default)]
struct DeadNonceList {
    set: HashSet<(Name, u32)>,
    queue: VecDeque<(SimTime, Name, u32)>,
}

impl DeadNonceList {
    fn insert(&mut self, name: &Name, nonce: u32, until: SimTime) {
        if self.set.insert((name.clone(), nonce)) {
            self.queue.push_back((until, name.clone(), nonce));
        }
    }

    fn contains(&self, name: &Name, nonce: u32) -> bool {
        !self.set.is_empty() && self.set.contains(&(name.clone(), nonce))
    }

    fn purge(&mut self, now: SimTime) {
        while let Some((until, _, _)) = self.queue.front() {
            if *until > now {
                break;
            }
            let (_, name, nonce) = self.queue.pop_front().unwrap();
            self.set.remove(&(name, nonce));
        }
    }
}

/// One node's forwarding daemon: faces, PIT, FIB and CS.
#[derive(Debug, Clone)]
pub struct Forwarder {
    node: NodeId,
    faces: Vec<Face>,
    pit: Pit,
    fib: Fib,
    cs: ContentStore,
    dead_nonces: DeadNonceList,
    config: ForwarderConfig,
    counters: ForwarderCounters,
}

impl Forwarder {
    pub fn new(node: NodeId, config: ForwarderConfig) -> Self {
        Forwarder {
            node,
            faces: Vec::new(),
            pit: Pit::new(config.pit_capacity),
            fib: Fib::new(),
            cs: ContentStore::new(config.cs_capacity),
            dead_nonces: DeadNonceList::default(),
            config,
            counters: ForwarderCounters::default(),
        }
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn add_face(&mut self, kind: FaceKind) -> FaceId {
        let id = FaceId(self.faces.len() as u32);
        self.faces.push(Face { id, kind, node: self.node });
        id
    }

    pub fn face(&self, id: FaceId) -> Option<&Face> {
        self.faces.get(id.0 as usize)
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn add_route(&mut self, prefix: Name, face: FaceId, cost: u32) {
        self.fib.add_route(prefix, face, cost);
    }

    pub fn pit(&self) -> &Pit {
        &self.pit
    }

    pub fn fib(&self) -> &Fib {
        &self.fib
    }

    pub fn cs(&self) -> &ContentStore {
        &self.cs
    }

    pub fn cs_mut(&mut self) -> &mut ContentStore {
        &mut self.cs
    }

    pub fn counters(&self) -> &ForwarderCounters {
        &self.counters
    }

    pub fn config(&self) -> &ForwarderConfig {
        &self.config
    }

    /// Incoming interest pipeline: loop check, PIT insert, CS lookup,
    /// then best-route forwarding via the FIB.
    pub fn on_incoming_interest(
        &mut self,
        face: FaceId,
        src_mac: Option<MacAddress>,
        interest: Interest,
        now: SimTime,
    ) -> Vec<ForwardAction> {
        self.counters.packets_processed += 1;
        self.counters.interests_in += 1;
        let Some(in_kind) = self.face(face).map(|f| f.kind) else {
            return vec![ForwardAction::Drop(DropReason::UnknownFace)];
        };
        if interest.name.validate_for_packet().is_err() || interest.lifetime.is_zero() {
            self.counters.protocol_errors += 1;
            return vec![ForwardAction::Drop(DropReason::MalformedName)];
        }
        let name = &interest.name;
        let nonce = interest.nonce;
        let duplicate = self.dead_nonces.contains(name, nonce) || self.pit.get(name).is_some_and(|e| e.has_nonce(nonce));
        if duplicate {
            self.counters.duplicates += 1;
            return vec![ForwardAction::Drop(DropReason::DuplicateNonce)];
        }

        let sender = src_mac.filter(|m| in_kind.has_mac() && !m.is_broadcast());
        let expiry = now + interest.lifetime;
        let (entry, created) = match self.pit.find_or_insert(name) {
            Ok(found) => found,
            Err(_) => {
                self.counters.pit_overflow += 1;
                return vec![ForwardAction::Drop(DropReason::PitOverflow)];
            }
        };
        let pending = entry.has_live_out_record(now);
        // a nonce dropped from the PIT must stay known as seen
        let dead_until = now + self.config.dead_nonce_lifetime;
        if let Some(old) = entry.upsert_in_record(face, nonce, expiry, sender) {
            self.dead_nonces.insert(name, old, dead_until);
        }
        if pending {
            self.counters.aggregated += 1;
            return Vec::new();
        }

        if let Some(data) = self.cs.lookup(name).cloned() {
            self.counters.cs_hits += 1;
            let entry = self.pit.get_mut(name).expect("entry inserted above");
            let pos = entry.in_records.iter().position(|r| r.face == face).expect("in-record inserted above");
            let rec = entry.in_records.remove(pos);
            if entry.in_records.is_empty() {
                self.pit.remove(name);
            }
            self.dead_nonces.insert(name, nonce, now + self.config.dead_nonce_lifetime);
            self.counters.data_sent += 1;
            return vec![ForwardAction::SendData {
                face,
                data,
                candidates: rec.sender_macs,
            }];
        }
        self.counters.cs_misses += 1;

        let ttl = self.config.mac_ttl;
        let choice = self.fib.longest_prefix_match_mut(name).and_then(|fe| {
            fe.next_hops.iter_mut().find(|nh| nh.face != face).map(|nh| {
                nh.evict_stale(now, ttl);
                (nh.face, nh.live_macs(now, ttl))
            })
        });
        let Some((out_face, mut candidates)) = choice else {
            self.counters.no_route += 1;
            self.reject(name, face, created, nonce, now);
            return vec![ForwardAction::Drop(DropReason::NoRoute)];
        };
        if !self.face(out_face).is_some_and(|f| f.kind.has_mac()) {
            candidates.clear();
        }
        let entry = self.pit.get_mut(name).expect("entry inserted above");
        if let Some(old) = entry.upsert_out_record(out_face, nonce, expiry) {
            self.dead_nonces.insert(name, old, now + self.config.dead_nonce_lifetime);
        }
        self.counters.interests_forwarded += 1;
        vec![ForwardAction::SendInterest {
            face: out_face,
            interest,
            candidates,
        }]
    }

    /// Incoming data pipeline: PIT match, CS insert, next-hop MAC learning,
    /// one send per pending downstream face.
    pub fn on_incoming_data(&mut self, face: FaceId, src_mac: Option<MacAddress>, data: Data, now: SimTime) -> Vec<ForwardAction> {
        self.counters.packets_processed += 1;
        self.counters.data_in += 1;
        let Some(in_kind) = self.face(face).map(|f| f.kind) else {
            return vec![ForwardAction::Drop(DropReason::UnknownFace)];
        };
        if data.name.validate_for_packet().is_err() || data.payload_size == 0 {
            self.counters.protocol_errors += 1;
            return vec![ForwardAction::Drop(DropReason::MalformedName)];
        }
        let live = self.pit.get(&data.name).is_some_and(|e| e.live_in_records(now).next().is_some());
        if !live {
            self.counters.unsolicited += 1;
            return vec![ForwardAction::Drop(DropReason::Unsolicited)];
        }
        let entry = self.pit.remove(&data.name).expect("checked above");
        self.counters.satisfied += 1;

        if self.cs.capacity() > 0 {
            self.cs.insert(data.clone());
        }
        if let Some(mac) = src_mac.filter(|m| in_kind.has_mac() && !m.is_broadcast()) {
            let ttl = self.config.mac_ttl;
            if let Some(nh) = self.fib.longest_prefix_match_mut(&data.name).and_then(|fe| fe.next_hop_mut(face)) {
                nh.evict_stale(now, ttl);
                nh.learn(mac, now);
            }
        }

        let until = now + self.config.dead_nonce_lifetime;
        for r in &entry.in_records {
            self.dead_nonces.insert(&entry.name, r.nonce, until);
        }
        for r in &entry.out_records {
            self.dead_nonces.insert(&entry.name, r.nonce, until);
        }

        let mut actions = Vec::with_capacity(entry.in_records.len());
        for rec in entry.in_records.into_iter().filter(|r| r.expiry > now && r.face != face) {
            self.counters.data_sent += 1;
            actions.push(ForwardAction::SendData {
                face: rec.face,
                data: data.clone(),
                candidates: rec.sender_macs,
            });
        }
        actions
    }

    /// Removes expired PIT state. Deleted entries count as unsatisfied.
    pub fn pit_expire(&mut self, now: SimTime) -> Vec<PitEntry> {
        self.dead_nonces.purge(now);
        let until = now + self.config.dead_nonce_lifetime;
        let dnl = &mut self.dead_nonces;
        let dead = self.pit.expire(now, |name, nonce| dnl.insert(name, nonce, until));
        for e in &dead {
            for r in &e.in_records {
                self.dead_nonces.insert(&e.name, r.nonce, until);
            }
            for r in &e.out_records {
                self.dead_nonces.insert(&e.name, r.nonce, until);
            }
        }
        self.counters.unsatisfied += dead.len() as u64;
        dead
    }

    /// Forgets every MAC learned on `face`, e.g. after the link moved to
    /// another BSS.
    pub fn forget_learned_macs(&mut self, face: FaceId) {
        self.fib.forget_macs_on(face);
    }

    // Rejecting a pending interest: no usable next hop.
    fn reject(&mut self, name: &Name, face: FaceId, created: bool, nonce: u32, now: SimTime) {
        self.dead_nonces.insert(name, nonce, now + self.config.dead_nonce_lifetime);
        if created {
            self.pit.remove(name);
            return;
        }
        if let Some(entry) = self.pit.get_mut(name) {
            entry.in_records.retain(|r| r.face != face);
            if entry.in_records.is_empty() {
                self.pit.remove(name);
            }
        }
    }

    /// Diagnostic dump of PIT, FIB and CS, one record per line, sorted.
    pub fn dump_tables(&self, now: SimTime) -> String {
        let mut lines = Vec::new();
        let mut pit: Vec<_> = self.pit.iter().collect();
        pit.sort_by(|a, b| a.name.cmp(&b.name));
        for e in pit {
            let mut line = format!("PIT {}", e.name);
            for r in &e.in_records {
                let macs: Vec<String> = r.sender_macs.iter().map(|m| m.to_string()).collect();
                let _ = write!(
                    line,
                    " in={}:nonce={:08x}:expiry={}:macs=[{}]",
                    r.face,
                    r.nonce,
                    r.expiry,
                    macs.join(",")
                );
            }
            for r in &e.out_records {
                let _ = write!(line, " out={}:nonce={:08x}:expiry={}", r.face, r.nonce, r.expiry);
            }
            lines.push(line);
        }
        for e in self.fib.iter() {
            for nh in &e.next_hops {
                let macs: Vec<String> = nh.live_macs(now, self.config.mac_ttl).iter().map(|m| m.to_string()).collect();
                lines.push(format!("FIB {} {} cost={} macs=[{}]", e.prefix, nh.face, nh.cost, macs.join(",")));
            }
        }
        for name in self.cs.lru_order() {
            lines.push(format!("CS {name}"));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    fn t(s: f64) -> SimTime {
        SimTime::from_secs_f64(s)
    }

    /// An AP: wireless face 0, wired uplink face 1, route /p via the uplink.
    fn ap() -> Forwarder {
        let mut f = Forwarder::new(
            NodeId(0),
            ForwarderConfig {
                cs_capacity: 10_000,
                ..Default::default()
            },
        );
        let wifi = f.add_face(FaceKind::Wireless);
        let up = f.add_face(FaceKind::WiredP2p);
        assert_eq!((wifi, up), (FaceId(0), FaceId(1)));
        f.add_route(n("/p"), up, 0);
        f
    }

    const WIFI: FaceId = FaceId(0);
    const UPLINK: FaceId = FaceId(1);

    #[test]
    fn interest_recorded_then_forwarded_upstream() {
        let mut f = ap();
        let m1 = MacAddress::local(1);
        let acts = f.on_incoming_interest(WIFI, Some(m1), Interest::new(n("/p/v7/3"), 11), t(0.0));
        assert_eq!(acts.len(), 1);
        assert!(matches!(&acts[0], ForwardAction::SendInterest { face, candidates, .. } if *face == UPLINK && candidates.is_empty()));
        let e = f.pit().get(&n("/p/v7/3")).unwrap();
        assert_eq!(e.in_records.len(), 1);
        assert_eq!(e.in_records[0].face, WIFI);
        assert_eq!(e.in_records[0].sender_macs, vec![m1]);
        assert_eq!(e.in_records[0].expiry, t(4.0));
        assert_eq!(e.out_records[0].face, UPLINK);
    }

    #[test]
    fn duplicate_nonce_dropped_pit_unchanged() {
        let mut f = ap();
        let i = Interest::new(n("/p/v7/3"), 11);
        f.on_incoming_interest(WIFI, Some(MacAddress::local(1)), i.clone(), t(0.0));
        let before = f.pit().get(&n("/p/v7/3")).cloned();
        let acts = f.on_incoming_interest(WIFI, Some(MacAddress::local(1)), i, t(0.1));
        assert_eq!(acts, vec![ForwardAction::Drop(DropReason::DuplicateNonce)]);
        assert_eq!(f.pit().get(&n("/p/v7/3")).cloned(), before);
        assert_eq!(f.counters().duplicates, 1);
    }

    #[test]
    fn aggregation_forwards_once() {
        let mut f = ap();
        let extra = f.add_face(FaceKind::WiredP2p);
        let a = f.on_incoming_interest(WIFI, Some(MacAddress::local(1)), Interest::new(n("/p/x"), 1), t(0.0));
        let b = f.on_incoming_interest(extra, None, Interest::new(n("/p/x"), 2), t(0.01));
        let sends = a
            .iter()
            .chain(b.iter())
            .filter(|x| matches!(x, ForwardAction::SendInterest { .. }))
            .count();
        assert_eq!(sends, 1);
        let e = f.pit().get(&n("/p/x")).unwrap();
        assert_eq!(e.in_records.len(), 2);
        assert_eq!(e.out_records.len(), 1);
    }

    #[test]
    fn data_learns_upstream_mac_and_fans_out() {
        // vehicle-like node: app face 0, wireless face 1, default route
        let mut v = Forwarder::new(NodeId(9), ForwarderConfig::default());
        let app = v.add_face(FaceKind::Application);
        let wifi = v.add_face(FaceKind::Wireless);
        v.add_route(Name::root(), wifi, 0);
        let acts = v.on_incoming_interest(app, None, Interest::new(n("/p/1"), 5), t(0.0));
        assert!(matches!(&acts[0], ForwardAction::SendInterest { candidates, .. } if candidates.is_empty()));
        let m_ap = MacAddress::local(100);
        let acts = v.on_incoming_data(wifi, Some(m_ap), Data::new(n("/p/1"), 1024), t(0.05));
        assert!(matches!(&acts[..], [ForwardAction::SendData { face, .. }] if *face == app));
        // the next interest sees the learned MAC
        let acts = v.on_incoming_interest(app, None, Interest::new(n("/p/2"), 6), t(0.1));
        assert!(matches!(&acts[0], ForwardAction::SendInterest { candidates, .. } if candidates == &vec![m_ap]));
        // and it ages out after the TTL without refresh
        let acts = v.on_incoming_interest(app, None, Interest::new(n("/p/3"), 7), t(2.06));
        assert!(matches!(&acts[0], ForwardAction::SendInterest { candidates, .. } if candidates.is_empty()));
    }

    #[test]
    fn data_hit_inserts_cs_and_carries_senders() {
        let mut f = ap();
        let m1 = MacAddress::local(1);
        f.on_incoming_interest(WIFI, Some(m1), Interest::new(n("/p/v7/3"), 1), t(0.0));
        let acts = f.on_incoming_data(UPLINK, None, Data::new(n("/p/v7/3"), 1024), t(0.06));
        assert_eq!(
            acts,
            vec![ForwardAction::SendData {
                face: WIFI,
                data: Data::new(n("/p/v7/3"), 1024),
                candidates: vec![m1]
            }]
        );
        assert!(f.pit().get(&n("/p/v7/3")).is_none());
        assert!(f.cs().contains(&n("/p/v7/3")));
    }

    #[test]
    fn unsolicited_data_counted() {
        let mut f = ap();
        let acts = f.on_incoming_data(UPLINK, None, Data::new(n("/p/none"), 1024), t(0.0));
        assert_eq!(acts, vec![ForwardAction::Drop(DropReason::Unsolicited)]);
        assert_eq!(f.counters().unsolicited, 1);
        assert!(f.cs().is_empty());
    }

    #[test]
    fn cs_hit_answers_on_incoming_face() {
        let mut f = ap();
        f.cs_mut().insert(Data::new(n("/p/1"), 1024));
        let m2 = MacAddress::local(2);
        let acts = f.on_incoming_interest(WIFI, Some(m2), Interest::new(n("/p/1"), 3), t(0.0));
        assert!(matches!(&acts[..], [ForwardAction::SendData { face, candidates, .. }] if *face == WIFI && candidates == &vec![m2]));
        assert!(f.pit().is_empty());
        assert_eq!(f.counters().cs_hits, 1);
    }

    #[test]
    fn fib_miss_is_dropped_and_pit_cleaned() {
        let mut f = ap();
        let acts = f.on_incoming_interest(WIFI, Some(MacAddress::local(1)), Interest::new(n("/q/1"), 3), t(0.0));
        assert_eq!(acts, vec![ForwardAction::Drop(DropReason::NoRoute)]);
        assert!(f.pit().is_empty());
        assert_eq!(f.counters().no_route, 1);
    }

    #[test]
    fn never_forwards_back_out_the_incoming_face() {
        let mut v = Forwarder::new(NodeId(9), ForwarderConfig::default());
        let _app = v.add_face(FaceKind::Application);
        let wifi = v.add_face(FaceKind::Wireless);
        v.add_route(Name::root(), wifi, 0);
        let acts = v.on_incoming_interest(wifi, Some(MacAddress::local(3)), Interest::new(n("/veh/3/1"), 9), t(0.0));
        assert_eq!(acts, vec![ForwardAction::Drop(DropReason::NoRoute)]);
        assert_eq!(v.counters().packets_processed, 1);
    }

    #[test]
    fn malformed_name_rejected() {
        let mut f = ap();
        let acts = f.on_incoming_interest(WIFI, None, Interest::new(Name::root(), 1), t(0.0));
        assert_eq!(acts, vec![ForwardAction::Drop(DropReason::MalformedName)]);
        assert_eq!(f.counters().protocol_errors, 1);
    }

    #[test]
    fn pit_overflow_drops_newest() {
        let mut f = Forwarder::new(
            NodeId(0),
            ForwarderConfig {
                pit_capacity: Some(1),
                ..Default::default()
            },
        );
        let a = f.add_face(FaceKind::WiredP2p);
        let b = f.add_face(FaceKind::WiredP2p);
        f.add_route(Name::root(), b, 0);
        f.on_incoming_interest(a, None, Interest::new(n("/x/1"), 1), t(0.0));
        let acts = f.on_incoming_interest(a, None, Interest::new(n("/x/2"), 2), t(0.0));
        assert_eq!(acts, vec![ForwardAction::Drop(DropReason::PitOverflow)]);
        assert!(f.pit().get(&n("/x/1")).is_some());
    }

    #[test]
    fn expired_entries_count_unsatisfied() {
        let mut f = ap();
        f.on_incoming_interest(WIFI, None, Interest::new(n("/p/1"), 1), t(0.0));
        assert_eq!(f.pit_expire(t(4.0)).len(), 1);
        assert_eq!(f.counters().unsatisfied, 1);
        // the consumed nonce still guards against a replay
        let acts = f.on_incoming_interest(WIFI, None, Interest::new(n("/p/1"), 1), t(4.5));
        assert_eq!(acts, vec![ForwardAction::Drop(DropReason::DuplicateNonce)]);
    }

    #[test]
    fn dump_has_one_line_per_record() {
        let mut f = ap();
        f.on_incoming_interest(WIFI, Some(MacAddress::local(1)), Interest::new(n("/p/1"), 1), t(0.0));
        f.cs_mut().insert(Data::new(n("/p/0"), 1024));
        let dump = f.dump_tables(t(0.0));
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines.len(), 3, "{dump}");
        assert!(lines[0].starts_with("PIT /p/1 in=face0"));
        assert!(lines[1].starts_with("FIB /p face1"));
        assert_eq!(lines[2], "CS /p/0");
    }
}
