use std::collections::BTreeMap;
use std::time::Duration;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::apps::{assign_apps, consumer_next_name, producer_on_interest, producer_prefixes, AppState, ConsumerSpec};
use super::config::{ConfigError, ScenarioConfig};
use super::event::EventQueue;
use super::link::WiredLink;
use super::rng::{stream, Stream};
use crate::mobility::{generate_trace, kmh_to_mps, Trace, TraceError};
use crate::ndn::{
    select_frame_destination, Direction, FaceId, FaceKind, ForwardAction, Forwarder, ForwarderConfig, Interest,
    MacAddress, Name, NodeId, Packet,
};
use crate::stats::{NodeMetrics, NodeRole, RunMetrics};
use crate::time::SimTime;
use crate::wireless::{associate, Bss, Frame};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("traffic: {0}")]
    Traffic(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// One link-layer transmission, for inspection in tests and debugging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRecord {
    pub time: SimTime,
    pub sender: NodeId,
    pub src: MacAddress,
    pub dst: MacAddress,
    pub is_interest: bool,
    /// The learned candidates were empty when the destination was chosen.
    pub no_candidates: bool,
}

#[derive(Debug)]
enum Event {
    VehicleEnter(usize),
    VehicleExit(usize),
    AppSend(usize),
    Frame {
        bss: usize,
        to: usize,
        src: MacAddress,
        packet: Packet,
    },
    Wired {
        node: usize,
        face: FaceId,
        packet: Packet,
    },
    MobilityTick,
    PitSweep,
}

struct Node {
    fwd: Forwarder,
    mac: MacAddress,
    wifi: Option<FaceId>,
    app: Option<FaceId>,
    // face index -> (link index, direction)
    links: Vec<Option<(usize, usize)>>,
    metrics: NodeMetrics,
}

struct Pending {
    count: u64,
    expires: SimTime,
    retx_left: u32,
}

struct Vehicle {
    node: usize,
    track: usize,
    entry: SimTime,
    exit: SimTime,
    active: bool,
    bss: Option<usize>,
    spec: ConsumerSpec,
    state: AppState,
    sent: u64,
    pending: BTreeMap<Name, Pending>,
}

/// A single run: topology, nodes, media and the event loop.
pub struct Simulation {
    cfg: ScenarioConfig,
    trace: Trace,
    queue: EventQueue<Event>,
    nodes: Vec<Node>,
    positions: Vec<f64>,
    bsses: Vec<Bss>,
    ap_positions: Vec<f64>,
    links: Vec<(WiredLink, [(usize, FaceId); 2])>,
    vehicles: Vec<Vehicle>,
    producer: usize,
    first_vehicle: usize,
    prefixes: Vec<Name>,
    losses: ChaCha8Rng,
    nonces: ChaCha8Rng,
    end_of_traffic: SimTime,
    frame_log: Option<Vec<FrameRecord>>,
}

/// Executes one run of `cfg`, generating or loading its trajectories.
pub fn run(cfg: &ScenarioConfig) -> Result<RunMetrics, SimError> {
    Ok(Simulation::new(cfg.clone())?.run())
}

/// Trajectories for `cfg`: the configured trace file, or a generated trace.
pub fn build_trace(cfg: &ScenarioConfig) -> Result<Trace, SimError> {
    let max_speed = Some(kmh_to_mps(cfg.traffic.max_speed_kmh));
    match &cfg.traffic.trace_file {
        Some(path) => Ok(Trace::load(path, cfg.traffic.avenue_length_m, max_speed)?),
        None => generate_trace(&cfg.traffic, cfg.traffic_seed()).map_err(|e| SimError::Traffic(e.to_string())),
    }
}

impl Simulation {
    pub fn new(cfg: ScenarioConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        let trace = build_trace(&cfg)?;
        Ok(Self::with_trace(cfg, trace))
    }

    /// Builds the topology around an already validated trace.
    pub fn with_trace(cfg: ScenarioConfig, trace: Trace) -> Self {
        let ap_positions = cfg.ap_positions();
        let n_aps = ap_positions.len();
        let router = n_aps;
        let producer = n_aps + 1;
        let lifetime = cfg.interest_lifetime();
        let fwd_cfg = |cs: usize| ForwarderConfig {
            cs_capacity: cs,
            pit_capacity: cfg.topology.pit_capacity,
            mac_ttl: cfg.mac_ttl(),
            ..ForwarderConfig::default()
        };
        let mut nodes = Vec::new();
        let new_node = |nodes: &mut Vec<Node>, role: NodeRole, cs: usize| {
            let id = nodes.len();
            nodes.push(Node {
                fwd: Forwarder::new(NodeId(id as u32), fwd_cfg(cs)),
                mac: MacAddress::local(id as u32),
                wifi: None,
                app: None,
                links: Vec::new(),
                metrics: NodeMetrics::new(id as u32, role),
            });
            id
        };
        for _ in 0..n_aps {
            new_node(&mut nodes, NodeRole::Ap, cfg.topology.infra_cs_capacity);
        }
        new_node(&mut nodes, NodeRole::Router, cfg.topology.infra_cs_capacity);
        new_node(&mut nodes, NodeRole::Producer, cfg.topology.edge_cs_capacity);
        let first_vehicle = nodes.len();
        for _ in &trace.tracks {
            new_node(&mut nodes, NodeRole::Vehicle, cfg.topology.edge_cs_capacity);
        }

        let prefixes = producer_prefixes();
        let mut links = Vec::new();
        let mut connect = |nodes: &mut Vec<Node>, a: usize, b: usize, rate: f64, delay_ms: f64| {
            let fa = nodes[a].fwd.add_face(FaceKind::WiredP2p);
            let fb = nodes[b].fwd.add_face(FaceKind::WiredP2p);
            let idx = links.len();
            links.push((
                WiredLink::new(rate, Duration::from_secs_f64(delay_ms * 1e-3)),
                [(a, fa), (b, fb)],
            ));
            set_link(&mut nodes[a], fa, idx, 0);
            set_link(&mut nodes[b], fb, idx, 1);
            (fa, fb)
        };
        let t = &cfg.topology;
        let mut bsses = Vec::new();
        for ap in 0..n_aps {
            let wifi = nodes[ap].fwd.add_face(FaceKind::Wireless);
            nodes[ap].wifi = Some(wifi);
            let (up, _) = connect(&mut nodes, ap, router, t.ap_router_rate_bps, t.ap_router_delay_ms);
            for p in &prefixes {
                nodes[ap].fwd.add_route(p.clone(), up, 0);
            }
            // channels 1, 6, 11 repeating
            bsses.push(Bss::new(NodeId(ap as u32), nodes[ap].mac, [1, 6, 11][ap % 3]));
        }
        let (to_producer, _) = connect(
            &mut nodes,
            router,
            producer,
            t.router_producer_rate_bps,
            t.router_producer_delay_ms,
        );
        let app = nodes[producer].fwd.add_face(FaceKind::Application);
        nodes[producer].app = Some(app);
        for p in &prefixes {
            nodes[router].fwd.add_route(p.clone(), to_producer, 0);
            nodes[producer].fwd.add_route(p.clone(), app, 0);
        }

        let ids: Vec<u32> = trace.tracks.iter().map(|tr| tr.vehicle_id).collect();
        let specs = assign_apps(
            &ids,
            cfg.apps.scenario,
            cfg.traffic_seed(),
            cfg.apps.rate_min,
            cfg.apps.rate_max,
        );
        let mut vehicles = Vec::new();
        for (k, spec) in specs.into_iter().enumerate() {
            let node = first_vehicle + k;
            let n = &mut nodes[node];
            let app = n.fwd.add_face(FaceKind::Application);
            let wifi = n.fwd.add_face(FaceKind::Wireless);
            n.fwd.add_route(Name::root(), wifi, 0);
            n.app = Some(app);
            n.wifi = Some(wifi);
            n.metrics.app_kind = spec.kind;
            n.metrics.app_rate = spec.rate;
            let track = &trace.tracks[k];
            vehicles.push(Vehicle {
                node,
                track: k,
                entry: SimTime::from_secs_f64(track.entry()),
                exit: SimTime::from_secs_f64(track.exit()),
                active: false,
                bss: None,
                spec,
                state: AppState::default(),
                sent: 0,
                pending: BTreeMap::new(),
            });
        }

        let mut positions = vec![f64::NAN; nodes.len()];
        positions[..n_aps].copy_from_slice(&ap_positions);
        let last_exit = vehicles.iter().map(|v| v.exit).max().unwrap_or(SimTime::ZERO);
        let end_of_traffic = last_exit + lifetime + Duration::from_secs_f64(cfg.durations.drain_s);

        let mut queue = EventQueue::new();
        for (k, v) in vehicles.iter().enumerate() {
            queue.schedule(v.entry, Event::VehicleEnter(k));
        }
        if !vehicles.is_empty() {
            queue.schedule(SimTime::ZERO, Event::MobilityTick);
            queue.schedule(SimTime::ZERO, Event::PitSweep);
        }
        let losses = stream(cfg.seed, Stream::Losses);
        let nonces = stream(cfg.seed, Stream::Nonces);
        Simulation {
            cfg,
            trace,
            queue,
            nodes,
            positions,
            bsses,
            ap_positions,
            links,
            vehicles,
            producer,
            first_vehicle,
            prefixes,
            losses,
            nonces,
            end_of_traffic,
            frame_log: None,
        }
    }

    /// Records every frame put on the air.
    pub fn enable_frame_log(&mut self) {
        self.frame_log = Some(Vec::new());
    }

    pub fn frame_log(&self) -> &[FrameRecord] {
        self.frame_log.as_deref().unwrap_or(&[])
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    /// Runs to completion and returns the node counters.
    pub fn run(mut self) -> RunMetrics {
        self.run_to_end();
        self.metrics()
    }

    /// Runs to completion, keeping the simulation for inspection.
    pub fn run_to_end(&mut self) {
        while let Some((now, ev)) = self.queue.pop() {
            self.handle(now, ev);
        }
        let end = self.queue.now();
        for n in &mut self.nodes {
            n.fwd.pit_expire(end + self.cfg.interest_lifetime());
        }
    }

    pub fn metrics(&self) -> RunMetrics {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let mut m = n.metrics.clone();
            let c = n.fwd.counters();
            m.nfd_packets_processed = c.packets_processed;
            m.cs_hits = c.cs_hits;
            m.unsolicited = c.unsolicited;
            m.pit_unsatisfied = c.unsatisfied;
            nodes.push(m);
        }
        RunMetrics { nodes }
    }

    /// Diagnostic table dump of one node.
    pub fn dump_node(&self, node: usize) -> String {
        self.nodes[node].fwd.dump_tables(self.queue.now())
    }

    fn handle(&mut self, now: SimTime, ev: Event) {
        match ev {
            Event::VehicleEnter(k) => self.on_enter(k, now),
            Event::VehicleExit(k) => self.on_exit(k),
            Event::AppSend(k) => self.on_app_send(k, now),
            Event::Frame { bss, to, src, packet } => {
                // frames to a station that left this BSS meanwhile are lost
                if !self.bsses[bss].is_member(NodeId(to as u32)) {
                    return;
                }
                let face = self.nodes[to].wifi.expect("wireless node");
                self.receive(to, face, Some(src), packet, now);
            }
            Event::Wired { node, face, packet } => self.receive(node, face, None, packet, now),
            Event::MobilityTick => {
                self.update_positions(now);
                let next = now + Duration::from_secs_f64(self.cfg.durations.mobility_tick_ms * 1e-3);
                if next <= self.end_of_traffic {
                    self.queue.schedule(next, Event::MobilityTick);
                }
            }
            Event::PitSweep => {
                self.sweep(now);
                let next = now + Duration::from_secs_f64(self.cfg.durations.pit_sweep_ms * 1e-3);
                if next <= self.end_of_traffic {
                    self.queue.schedule(next, Event::PitSweep);
                }
            }
        }
    }

    fn on_enter(&mut self, k: usize, now: SimTime) {
        let v = &mut self.vehicles[k];
        v.active = true;
        let (node, exit) = (v.node, v.exit);
        self.positions[node] = self.trace.tracks[v.track].samples[0].position;
        self.reassociate(k);
        self.queue.schedule(exit, Event::VehicleExit(k));
        self.queue.schedule(now, Event::AppSend(k));
    }

    fn on_exit(&mut self, k: usize) {
        let v = &mut self.vehicles[k];
        v.active = false;
        if let Some(b) = v.bss.take() {
            self.bsses[b].leave(NodeId(v.node as u32));
        }
    }

    fn on_app_send(&mut self, k: usize, now: SimTime) {
        let shared_rate = self.cfg.apps.shared_rate;
        let lifetime = self.cfg.interest_lifetime();
        let v = &mut self.vehicles[k];
        if !v.active {
            return;
        }
        let name = consumer_next_name(&v.spec, &mut v.state, now, shared_rate);
        v.sent += 1;
        let next = v.entry + Duration::from_secs_f64(v.sent as f64 / v.spec.rate);
        if next < v.exit {
            self.queue.schedule(next, Event::AppSend(k));
        }
        let p = v.pending.entry(name.clone()).or_insert(Pending {
            count: 0,
            expires: now,
            retx_left: self.cfg.apps.max_retransmissions,
        });
        p.count += 1;
        p.expires = now + lifetime;
        let node = v.node;
        self.express(node, name, now);
    }

    fn express(&mut self, node: usize, name: Name, now: SimTime) {
        let interest = Interest::new(name, self.nonces.gen()).with_lifetime(self.cfg.interest_lifetime());
        let n = &mut self.nodes[node];
        n.metrics.interests_sent += 1;
        let face = n.app.expect("consumer app face");
        let actions = n.fwd.on_incoming_interest(face, None, interest, now);
        self.dispatch(node, actions, now);
    }

    fn receive(&mut self, node: usize, face: FaceId, src: Option<MacAddress>, packet: Packet, now: SimTime) {
        let fwd = &mut self.nodes[node].fwd;
        let actions = match packet {
            Packet::Interest(i) => fwd.on_incoming_interest(face, src, i, now),
            Packet::Data(d) => fwd.on_incoming_data(face, src, d, now),
        };
        self.dispatch(node, actions, now);
    }

    fn dispatch(&mut self, node: usize, actions: Vec<ForwardAction>, now: SimTime) {
        for action in actions {
            match action {
                ForwardAction::SendInterest {
                    face,
                    interest,
                    candidates,
                } => self.send(node, face, Packet::Interest(interest), &candidates, now),
                ForwardAction::SendData { face, data, candidates } => {
                    self.send(node, face, Packet::Data(data), &candidates, now)
                }
                ForwardAction::Drop(_) => {}
            }
        }
    }

    fn send(&mut self, node: usize, face: FaceId, packet: Packet, candidates: &[MacAddress], now: SimTime) {
        let n = &self.nodes[node];
        if Some(face) == n.app {
            match packet {
                Packet::Interest(i) if node == self.producer => {
                    if let Some(d) = producer_on_interest(&i, &self.prefixes, self.cfg.apps.payload_bytes) {
                        let actions = self.nodes[node].fwd.on_incoming_data(face, None, d, now);
                        self.dispatch(node, actions, now);
                    }
                }
                Packet::Data(d) => self.deliver_to_app(node, &d.name),
                Packet::Interest(_) => {}
            }
            return;
        }
        if Some(face) == n.wifi {
            self.send_wireless(node, packet, candidates, now);
            return;
        }
        if let Some(Some((link, dir))) = n.links.get(face.0 as usize).copied() {
            let (ref mut l, ends) = self.links[link];
            let at = l.send(dir, packet.wire_size(), now);
            let (peer, peer_face) = ends[1 - dir];
            self.queue.schedule(
                at,
                Event::Wired {
                    node: peer,
                    face: peer_face,
                    packet,
                },
            );
        }
    }

    fn deliver_to_app(&mut self, node: usize, name: &Name) {
        let k = node - self.first_vehicle;
        if let Some(p) = self.vehicles[k].pending.remove(name) {
            self.nodes[node].metrics.data_received += p.count;
        }
    }

    fn send_wireless(&mut self, node: usize, packet: Packet, candidates: &[MacAddress], now: SimTime) {
        let direction = if packet.is_interest() { Direction::Up } else { Direction::Down };
        let dest = select_frame_destination(direction, self.cfg.mode.deployment, candidates);
        let bss = if node < self.ap_positions.len() {
            Some(node)
        } else {
            let k = node - self.first_vehicle;
            self.vehicles[k].bss
        };
        let phy = &self.cfg.phy;
        let src = self.nodes[node].mac;
        let Some(b) = bss else {
            // not associated: nothing reaches the air
            self.nodes[node].metrics.link_losses += dest.addresses().len() as u64;
            return;
        };
        let positions = &self.positions;
        let range = phy.range_m;
        let loss = phy.attempt_loss;
        for dst in dest.addresses() {
            let frame = Frame::new(src, dst, packet.clone(), phy);
            let losses = &mut self.losses;
            let out = self.bsses[b].transmit(
                NodeId(node as u32),
                &frame,
                now,
                phy,
                |a, c| (positions[a.0 as usize] - positions[c.0 as usize]).abs() <= range,
                || loss > 0.0 && losses.gen_bool(loss),
            );
            let m = &mut self.nodes[node].metrics;
            if out.queue_drop {
                m.queue_drops += 1;
                continue;
            }
            if frame.is_broadcast() {
                m.frames_broadcast += 1;
            } else {
                m.frames_unicast += 1;
            }
            m.frame_attempts += out.attempts as u64;
            m.airtime_used_s += out.airtime.as_secs_f64();
            m.link_losses += out.lost as u64;
            if let Some(log) = &mut self.frame_log {
                log.push(FrameRecord {
                    time: out.start,
                    sender: NodeId(node as u32),
                    src,
                    dst,
                    is_interest: packet.is_interest(),
                    no_candidates: candidates.is_empty(),
                });
            }
            for (to, at) in out.deliveries {
                self.queue.schedule(
                    at,
                    Event::Frame {
                        bss: b,
                        to: to.0 as usize,
                        src,
                        packet: packet.clone(),
                    },
                );
            }
        }
    }

    fn update_positions(&mut self, now: SimTime) {
        let t = now.as_secs_f64();
        for k in 0..self.vehicles.len() {
            let v = &self.vehicles[k];
            if !v.active {
                continue;
            }
            if let Some(p) = self.trace.tracks[v.track].position_at(t) {
                self.positions[v.node] = p;
            }
            self.reassociate(k);
        }
    }

    fn reassociate(&mut self, k: usize) {
        let v = &mut self.vehicles[k];
        let phy = &self.cfg.phy;
        let target = associate(self.positions[v.node], v.bss, &self.ap_positions, phy.range_m, phy.hysteresis_m);
        if target == v.bss {
            return;
        }
        let id = NodeId(v.node as u32);
        if let Some(old) = v.bss {
            self.bsses[old].leave(id);
            self.nodes[v.node].metrics.handovers += 1;
            if self.cfg.mode.flush_macs_on_handover {
                let wifi = self.nodes[v.node].wifi.expect("vehicle wireless face");
                self.nodes[v.node].fwd.forget_learned_macs(wifi);
            }
        }
        if let Some(new) = target {
            self.bsses[new].join(id, self.nodes[v.node].mac);
        }
        v.bss = target;
    }

    fn sweep(&mut self, now: SimTime) {
        for n in &mut self.nodes {
            n.fwd.pit_expire(now);
        }
        let mut retx = Vec::new();
        for v in &mut self.vehicles {
            let active = v.active;
            v.pending.retain(|name, p| {
                if p.expires > now {
                    return true;
                }
                if p.retx_left > 0 && active {
                    retx.push((v.node, name.clone(), p.retx_left - 1));
                }
                false
            });
        }
        let lifetime = self.cfg.interest_lifetime();
        for (node, name, retx_left) in retx {
            let k = node - self.first_vehicle;
            self.vehicles[k].pending.insert(
                name.clone(),
                Pending {
                    count: 1,
                    expires: now + lifetime,
                    retx_left,
                },
            );
            self.express(node, name, now);
        }
    }
}

fn set_link(node: &mut Node, face: FaceId, link: usize, dir: usize) {
    let i = face.0 as usize;
    if node.links.len() <= i {
        node.links.resize(i + 1, None);
    }
    node.links[i] = Some((link, dir));
}
