use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::mobility::TrafficParams;
use crate::ndn::DeploymentMode;
use crate::wireless::PhyProfile;

/// Everything one run needs. Loaded from TOML; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Seed of the per-run streams (frame losses, nonces).
    #[serde(default)]
    pub seed: u64,
    /// Seed of the traffic streams (trajectories, app rates, app
    /// assignment). Defaults to `seed`.
    #[serde(default)]
    pub traffic_seed: Option<u64>,
    #[serde(default)]
    pub phy: PhyProfile,
    #[serde(default)]
    pub topology: TopologyConfig,
    #[serde(default)]
    pub traffic: TrafficParams,
    #[serde(default)]
    pub apps: AppsConfig,
    #[serde(default)]
    pub mode: ModeConfig,
    #[serde(default)]
    pub durations: DurationsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologyConfig {
    /// AP positions along the avenue; `None` spaces three APs at 1/6, 3/6
    /// and 5/6 of its length.
    pub ap_positions_m: Option<Vec<f64>>,
    pub ap_router_rate_bps: f64,
    pub ap_router_delay_ms: f64,
    pub router_producer_rate_bps: f64,
    pub router_producer_delay_ms: f64,
    /// Content store size of APs and the router.
    pub infra_cs_capacity: usize,
    /// Content store size of vehicles and the producer.
    pub edge_cs_capacity: usize,
    pub pit_capacity: Option<usize>,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            ap_positions_m: None,
            ap_router_rate_bps: 1e9,
            ap_router_delay_ms: 0.5,
            router_producer_rate_bps: 1e9,
            router_producer_delay_ms: 30.0,
            infra_cs_capacity: 10_000,
            edge_cs_capacity: 0,
            pit_capacity: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AppsConfig {
    /// 1: every vehicle requests its own prefix. 2: half the vehicles
    /// (rounded up) request a shared, time-synchronised prefix.
    pub scenario: u8,
    pub rate_min: f64,
    pub rate_max: f64,
    /// Sequence numbers per second of the shared prefix.
    pub shared_rate: f64,
    pub payload_bytes: usize,
    pub interest_lifetime_ms: f64,
    /// Re-expressions of a timed-out interest. 0 disables retransmission.
    pub max_retransmissions: u32,
}

impl Default for AppsConfig {
    fn default() -> Self {
        AppsConfig {
            scenario: 1,
            rate_min: 50.0,
            rate_max: 100.0,
            shared_rate: 75.0,
            payload_bytes: 1024,
            interest_lifetime_ms: 4000.0,
            max_retransmissions: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModeConfig {
    pub deployment: DeploymentMode,
    pub mac_ttl_ms: f64,
    /// Forget MACs learned on a vehicle's wireless face when it changes AP.
    pub flush_macs_on_handover: bool,
}

impl Default for ModeConfig {
    fn default() -> Self {
        ModeConfig {
            deployment: DeploymentMode::Proposal,
            mac_ttl_ms: 2000.0,
            flush_macs_on_handover: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DurationsConfig {
    /// Period of position updates and association checks.
    pub mobility_tick_ms: f64,
    pub pit_sweep_ms: f64,
    /// Extra time simulated after the last vehicle leaves.
    pub drain_s: f64,
}

impl Default for DurationsConfig {
    fn default() -> Self {
        DurationsConfig {
            mobility_tick_ms: 100.0,
            pit_sweep_ms: 500.0,
            drain_s: 1.0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file. A relative `trace_file` is made
    /// relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(trace) = &cfg.traffic.trace_file {
            if trace.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.traffic.trace_file = Some(base.join(trace));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn traffic_seed(&self) -> u64 {
        self.traffic_seed.unwrap_or(self.seed)
    }

    pub fn ap_positions(&self) -> Vec<f64> {
        match &self.topology.ap_positions_m {
            Some(p) => p.clone(),
            None => [1.0, 3.0, 5.0]
                .iter()
                .map(|k| self.traffic.avenue_length_m * k / 6.0)
                .collect(),
        }
    }

    pub fn interest_lifetime(&self) -> Duration {
        Duration::from_secs_f64(self.apps.interest_lifetime_ms * 1e-3)
    }

    pub fn mac_ttl(&self) -> Duration {
        Duration::from_secs_f64(self.mode.mac_ttl_ms * 1e-3)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.phy.validate().map_err(|e| ConfigError::Parse(e.to_string()))?;
        self.traffic.validate().map_err(|e| invalid(&format!("traffic.{}", e.field), e.reason))?;
        let t = &self.topology;
        let aps = self.ap_positions();
        if aps.is_empty() {
            return Err(invalid("topology.ap_positions_m", "at least one AP is required"));
        }
        if aps.iter().any(|p| !p.is_finite()) {
            return Err(invalid("topology.ap_positions_m", "positions must be finite"));
        }
        for (field, rate) in [
            ("topology.ap_router_rate_bps", t.ap_router_rate_bps),
            ("topology.router_producer_rate_bps", t.router_producer_rate_bps),
        ] {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(invalid(field, "must be positive"));
            }
        }
        for (field, delay) in [
            ("topology.ap_router_delay_ms", t.ap_router_delay_ms),
            ("topology.router_producer_delay_ms", t.router_producer_delay_ms),
        ] {
            if !(delay >= 0.0 && delay.is_finite()) {
                return Err(invalid(field, "must be non-negative"));
            }
        }
        let a = &self.apps;
        if a.scenario != 1 && a.scenario != 2 {
            return Err(invalid("apps.scenario", "must be 1 or 2"));
        }
        if !(a.rate_min > 0.0 && a.rate_min <= a.rate_max && a.rate_max.is_finite()) {
            return Err(invalid("apps.rate_min", "need 0 < rate_min <= rate_max"));
        }
        if !(a.shared_rate > 0.0 && a.shared_rate.is_finite()) {
            return Err(invalid("apps.shared_rate", "must be positive"));
        }
        if a.payload_bytes == 0 {
            return Err(invalid("apps.payload_bytes", "must be positive"));
        }
        if !(a.interest_lifetime_ms > 0.0 && a.interest_lifetime_ms.is_finite()) {
            return Err(invalid("apps.interest_lifetime_ms", "must be positive"));
        }
        if !(self.mode.mac_ttl_ms > 0.0 && self.mode.mac_ttl_ms.is_finite()) {
            return Err(invalid("mode.mac_ttl_ms", "must be positive"));
        }
        let d = &self.durations;
        if !(d.mobility_tick_ms > 0.0 && d.mobility_tick_ms.is_finite()) {
            return Err(invalid("durations.mobility_tick_ms", "must be positive"));
        }
        if !(d.pit_sweep_ms > 0.0 && d.pit_sweep_ms.is_finite()) {
            return Err(invalid("durations.pit_sweep_ms", "must be positive"));
        }
        if !(d.drain_s >= 0.0 && d.drain_s.is_finite()) {
            return Err(invalid("durations.drain_s", "must be non-negative"));
        }
        Ok(())
    }
}
