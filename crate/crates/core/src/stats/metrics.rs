use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    Vehicle,
    Ap,
    Router,
    Producer,
}

/// Consumer application type installed on a vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AppKind {
    None,
    /// Requests its own prefix with a per-app sequence counter.
    Distinct,
    /// Requests a common prefix whose sequence follows global time.
    Shared,
}

impl fmt::Display for AppKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AppKind::None => "none",
            AppKind::Distinct => "distinct",
            AppKind::Shared => "shared",
        })
    }
}

impl FromStr for AppKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(AppKind::None),
            "distinct" => Ok(AppKind::Distinct),
            "shared" => Ok(AppKind::Shared),
            other => Err(format!("unknown app kind {other:?}")),
        }
    }
}

/// Counters of one node over one run. Column order of the metrics CSV is
/// the field order here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMetrics {
    pub node_id: u32,
    pub role: NodeRole,
    pub app_kind: AppKind,
    /// Consumer rate, interests/s (0 without an app).
    pub app_rate: f64,
    pub interests_sent: u64,
    pub data_received: u64,
    pub nfd_packets_processed: u64,
    pub frames_broadcast: u64,
    pub frames_unicast: u64,
    pub frame_attempts: u64,
    pub airtime_used_s: f64,
    pub link_losses: u64,
    pub queue_drops: u64,
    pub handovers: u64,
    pub cs_hits: u64,
    pub unsolicited: u64,
    pub pit_unsatisfied: u64,
}

impl NodeMetrics {
    pub fn new(node_id: u32, role: NodeRole) -> Self {
        NodeMetrics {
            node_id,
            role,
            app_kind: AppKind::None,
            app_rate: 0.0,
            interests_sent: 0,
            data_received: 0,
            nfd_packets_processed: 0,
            frames_broadcast: 0,
            frames_unicast: 0,
            frame_attempts: 0,
            airtime_used_s: 0.0,
            link_losses: 0,
            queue_drops: 0,
            handovers: 0,
            cs_hits: 0,
            unsolicited: 0,
            pit_unsatisfied: 0,
        }
    }

    /// Data received per interest sent; `None` for nodes that sent nothing.
    pub fn satisfaction_ratio(&self) -> Option<f64> {
        (self.interests_sent > 0).then(|| self.data_received as f64 / self.interests_sent as f64)
    }
}

/// All node counters of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMetrics {
    pub nodes: Vec<NodeMetrics>,
}

/// Sums over a set of consumer nodes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Totals {
    pub consumers: u64,
    pub interests_sent: u64,
    pub data_received: u64,
}

impl Totals {
    pub fn satisfaction_ratio(&self) -> f64 {
        if self.interests_sent == 0 {
            0.0
        } else {
            self.data_received as f64 / self.interests_sent as f64
        }
    }
}

impl RunMetrics {
    pub fn consumers(&self) -> impl Iterator<Item = &NodeMetrics> {
        self.nodes.iter().filter(|n| n.app_kind != AppKind::None)
    }

    pub fn totals(&self) -> Totals {
        self.totals_where(|_| true)
    }

    pub fn totals_for(&self, kind: AppKind) -> Totals {
        self.totals_where(|n| n.app_kind == kind)
    }

    fn totals_where(&self, keep: impl Fn(&NodeMetrics) -> bool) -> Totals {
        let mut t = Totals::default();
        for n in self.consumers().filter(|n| keep(n)) {
            t.consumers += 1;
            t.interests_sent += n.interests_sent;
            t.data_received += n.data_received;
        }
        t
    }

    /// NFD packets processed summed over every node.
    pub fn packets_processed(&self) -> u64 {
        self.nodes.iter().map(|n| n.nfd_packets_processed).sum()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for n in &self.nodes {
            w.serialize(n)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<RunMetrics, csv::Error> {
        let mut r = csv::Reader::from_reader(input);
        let nodes = r.deserialize().collect::<Result<Vec<NodeMetrics>, _>>()?;
        Ok(RunMetrics { nodes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consumer(id: u32, kind: AppKind, sent: u64, got: u64) -> NodeMetrics {
        NodeMetrics {
            app_kind: kind,
            interests_sent: sent,
            data_received: got,
            ..NodeMetrics::new(id, NodeRole::Vehicle)
        }
    }

    #[test]
    fn csv_round_trip() {
        let m = RunMetrics {
            nodes: vec![
                NodeMetrics::new(0, NodeRole::Ap),
                consumer(5, AppKind::Shared, 100, 80),
            ],
        };
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("node_id,role,app_kind,app_rate,interests_sent,data_received,"));
        assert_eq!(RunMetrics::read_csv(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn split_by_kind_sums_to_total() {
        let m = RunMetrics {
            nodes: vec![
                consumer(5, AppKind::Shared, 100, 80),
                consumer(6, AppKind::Distinct, 50, 10),
                NodeMetrics::new(0, NodeRole::Ap),
            ],
        };
        let (s, d, t) = (m.totals_for(AppKind::Shared), m.totals_for(AppKind::Distinct), m.totals());
        assert_eq!(s.interests_sent + d.interests_sent, t.interests_sent);
        assert_eq!(s.data_received + d.data_received, t.data_received);
        assert_eq!(t.consumers, 2);
        assert!((t.satisfaction_ratio() - 0.6).abs() < 1e-12);
    }
}
