use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vndn_core::sim::{run, ScenarioConfig};
use vndn_core::stats::RunMetrics;

use crate::{config_hash, CliError, Instance};

/// Machine-readable record written next to every metrics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_hash: String,
    pub instance: String,
    pub seed: u64,
    pub traffic_seed: u64,
    /// Seed given on the command line, if any.
    pub seed_override: Option<u64>,
    pub metrics_file: String,
}

/// Runs one instance of `cfg`.
pub fn run_one(cfg: &ScenarioConfig) -> Result<RunMetrics, CliError> {
    run(cfg).map_err(|e| CliError::Run {
        instance: Instance::new(cfg.mode.deployment, cfg.apps.scenario),
        seed: cfg.seed,
        reason: e.to_string(),
    })
}

pub(crate) fn run_stem(cfg: &ScenarioConfig) -> (PathBuf, String) {
    let inst = Instance::new(cfg.mode.deployment, cfg.apps.scenario);
    (PathBuf::from("runs").join(inst.to_string()), format!("seed-{}", cfg.seed))
}

/// Writes `runs/<instance>/seed-<seed>.csv` and its `.json` manifest under
/// `dir`. Returns both paths.
pub fn write_run(
    dir: &Path,
    cfg: &ScenarioConfig,
    metrics: &RunMetrics,
    seed_override: Option<u64>,
) -> Result<(PathBuf, PathBuf), CliError> {
    let (sub, stem) = run_stem(cfg);
    let run_dir = dir.join(sub);
    fs::create_dir_all(&run_dir).map_err(CliError::io(&run_dir))?;
    let csv_path = run_dir.join(format!("{stem}.csv"));
    let file = fs::File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    metrics.write_csv(file).map_err(CliError::csv(&csv_path))?;

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash(cfg),
        instance: Instance::new(cfg.mode.deployment, cfg.apps.scenario).to_string(),
        seed: cfg.seed,
        traffic_seed: cfg.traffic_seed(),
        seed_override,
        metrics_file: format!("{stem}.csv"),
    };
    let json_path = run_dir.join(format!("{stem}.json"));
    write_json(&json_path, &manifest)?;
    Ok((csv_path, json_path))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("manifest serializes");
    fs::write(path, text + "\n").map_err(CliError::io(path))
}

/// Stores the experiment's base config once per results directory.
pub(crate) fn write_config(dir: &Path, cfg: &ScenarioConfig) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let path = dir.join("config.toml");
    fs::write(&path, cfg.to_toml_string()).map_err(CliError::io(&path))
}
