//! Experiment orchestration for the vehicular NDN simulator: single runs,
//! the deployment x scenario x seed matrix, and pairwise comparisons.

mod compare;
mod matrix;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};
use vndn_core::ndn::DeploymentMode;
use vndn_core::sim::ScenarioConfig;

pub use compare::{compare_instances, load_instance_runs, COMPARE_METRIC};
pub use matrix::{run_matrix, write_matrix, MatrixOutcome, MatrixSpec};
pub use output::{run_one, write_run, RunManifest};

/// Environment variable supplying the default results directory.
pub const RESULTS_DIR_ENV: &str = "NDNSIM_RESULTS_DIR";

/// A (deployment, scenario) pair, labelled `Proposal-1` and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instance {
    pub mode: DeploymentMode,
    pub scenario: u8,
}

impl Instance {
    pub fn new(mode: DeploymentMode, scenario: u8) -> Self {
        Instance { mode, scenario }
    }

    /// The eight instances in matrix order.
    pub fn all() -> Vec<Instance> {
        DeploymentMode::ALL
            .iter()
            .flat_map(|&m| [1, 2].map(|s| Instance::new(m, s)))
            .collect()
    }

    /// Position in [`Instance::all`], used to derive seeds.
    pub fn index(self) -> u64 {
        let m = DeploymentMode::ALL.iter().position(|&m| m == self.mode).unwrap() as u64;
        m * 2 + (self.scenario as u64 - 1)
    }

    /// Applies this instance to a base config.
    pub fn configure(self, base: &ScenarioConfig) -> ScenarioConfig {
        let mut cfg = base.clone();
        cfg.mode.deployment = self.mode;
        cfg.apps.scenario = self.scenario;
        cfg
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.mode, self.scenario)
    }
}

impl FromStr for Instance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m, sc) = s
            .rsplit_once('-')
            .ok_or_else(|| format!("instance {s:?} is not of the form <deployment>-<scenario>"))?;
        let mode: DeploymentMode = m.parse()?;
        match sc {
            "1" => Ok(Instance::new(mode, 1)),
            "2" => Ok(Instance::new(mode, 2)),
            _ => Err(format!("instance {s:?}: scenario must be 1 or 2")),
        }
    }
}

/// Per-run seed: `base + instance_index * 1000 + run`.
pub fn run_seed(base: u64, instance: Instance, run: u64) -> u64 {
    base + instance.index() * 1000 + run
}

/// Traffic seed of a matrix run. It depends on the run index only, so every
/// instance sees the same vehicles for a given run.
pub fn run_traffic_seed(base: u64, run: u64) -> u64 {
    base + run
}

/// Hex SHA-256 prefix of the config with its per-run fields (seeds,
/// deployment, scenario) reset, so every run of one experiment lands in the
/// same directory.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let mut c = cfg.clone();
    let d = ScenarioConfig::default();
    c.seed = 0;
    c.traffic_seed = None;
    c.mode.deployment = d.mode.deployment;
    c.apps.scenario = d.apps.scenario;
    let digest = Sha256::digest(c.to_toml_string().as_bytes());
    digest[..6].iter().map(|b| format!("{b:02x}")).collect()
}

/// `<out>/cfg-<hash>`.
pub fn results_dir(out: &Path, cfg: &ScenarioConfig) -> PathBuf {
    out.join(format!("cfg-{}", config_hash(cfg)))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error("run {instance} seed {seed} failed: {reason}")]
    Run { instance: Instance, seed: u64, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv error on {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    /// 2 for bad configs or inputs, 3 for failures while running or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            _ => 3,
        }
    }

    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
        move |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}
