use std::fs;
use std::path::{Path, PathBuf};

use vndn_core::stats::{compare, ComparisonResult, RunMetrics};

use crate::{CliError, Instance};

/// Metric compared between instances: data packets received by vehicles.
pub const COMPARE_METRIC: &str = "data_received";

pub(crate) fn metric_values<'a>(runs: impl Iterator<Item = &'a RunMetrics>) -> Vec<f64> {
    runs.map(|m| m.totals().data_received as f64).collect()
}

/// Metrics CSVs of one instance under `dir`, ordered by seed.
pub fn load_instance_runs(dir: &Path, instance: Instance) -> Result<Vec<RunMetrics>, CliError> {
    let inst_dir = dir.join("runs").join(instance.to_string());
    let entries = fs::read_dir(&inst_dir)
        .map_err(|_| CliError::Input(format!("instance {instance} not found under {}", dir.display())))?;
    let mut files: Vec<(u64, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry.map_err(CliError::io(&inst_dir))?.path();
        let seed = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_prefix("seed-"))
            .and_then(|n| n.strip_suffix(".csv"))
            .and_then(|n| n.parse().ok());
        if let Some(seed) = seed {
            files.push((seed, path));
        }
    }
    if files.is_empty() {
        return Err(CliError::Input(format!("instance {instance} has no runs under {}", dir.display())));
    }
    files.sort();
    files
        .into_iter()
        .map(|(_, path)| {
            let f = fs::File::open(&path).map_err(CliError::io(&path))?;
            RunMetrics::read_csv(f).map_err(CliError::csv(&path))
        })
        .collect()
}

/// Compares two instances of a results directory and appends the row to
/// `compare.csv` there.
pub fn compare_instances(dir: &Path, a: Instance, b: Instance) -> Result<ComparisonResult, CliError> {
    let ra = load_instance_runs(dir, a)?;
    let rb = load_instance_runs(dir, b)?;
    if ra.len() != rb.len() {
        return Err(CliError::Input(format!(
            "{a} has {} runs but {b} has {}",
            ra.len(),
            rb.len()
        )));
    }
    let row = compare(
        &a.to_string(),
        &metric_values(ra.iter()),
        &b.to_string(),
        &metric_values(rb.iter()),
        COMPARE_METRIC,
    );
    let path = dir.join("compare.csv");
    let fresh = !path.exists();
    let file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(CliError::io(&path))?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    w.serialize(&row).map_err(CliError::csv(&path))?;
    w.flush().map_err(CliError::io(&path))?;
    Ok(row)
}
