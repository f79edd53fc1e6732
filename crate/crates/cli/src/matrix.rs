use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use vndn_core::sim::ScenarioConfig;
use vndn_core::stats::{compare, summarize, write_rows, ComparisonResult, InstanceSummary, RunMetrics};

use crate::compare::{metric_values, COMPARE_METRIC};
use crate::output::{run_one, write_config, write_json, write_run};
use crate::{config_hash, run_seed, run_traffic_seed, CliError, Instance};

/// What to run: every listed instance with `seeds` consecutive run indices.
#[derive(Debug, Clone)]
pub struct MatrixSpec {
    pub base: ScenarioConfig,
    pub base_seed: u64,
    pub seeds: u64,
    pub instances: Vec<Instance>,
    /// Print one progress line per finished run on stderr.
    pub progress: bool,
}

impl MatrixSpec {
    pub fn new(base: ScenarioConfig, base_seed: u64, seeds: u64) -> Self {
        MatrixSpec {
            base,
            base_seed,
            seeds,
            instances: Instance::all(),
            progress: false,
        }
    }

    /// Config of run `run` of `instance`.
    pub fn run_config(&self, instance: Instance, run: u64) -> ScenarioConfig {
        let mut cfg = instance.configure(&self.base);
        cfg.seed = run_seed(self.base_seed, instance, run);
        cfg.traffic_seed = Some(run_traffic_seed(self.base_seed, run));
        cfg
    }
}

#[derive(Debug, Clone)]
pub struct MatrixOutcome {
    /// Per instance, in spec order, the runs in run-index order.
    pub runs: Vec<(Instance, Vec<(ScenarioConfig, RunMetrics)>)>,
    pub summaries: Vec<InstanceSummary>,
    /// Every unordered instance pair, compared on data received.
    pub comparisons: Vec<ComparisonResult>,
}

impl MatrixOutcome {
    pub fn metrics(&self, instance: Instance) -> Option<Vec<&RunMetrics>> {
        self.runs
            .iter()
            .find(|(i, _)| *i == instance)
            .map(|(_, r)| r.iter().map(|(_, m)| m).collect())
    }

    pub fn comparison(&self, a: Instance, b: Instance) -> Option<ComparisonResult> {
        let (a, b) = (a.to_string(), b.to_string());
        self.comparisons.iter().find_map(|c| {
            if c.instance_a == a && c.instance_b == b {
                Some(c.clone())
            } else if c.instance_a == b && c.instance_b == a {
                // swap sides: U and A12 are reported for instance_a
                Some(ComparisonResult {
                    instance_a: a.clone(),
                    instance_b: b.clone(),
                    n1: c.n2,
                    n2: c.n1,
                    u_statistic: (c.n1 * c.n2) as f64 - c.u_statistic,
                    a12: 1.0 - c.a12,
                    ..c.clone()
                })
            } else {
                None
            }
        })
    }
}

/// Runs the matrix on `jobs` worker threads. Results do not depend on
/// `jobs` or on completion order.
pub fn run_matrix(spec: &MatrixSpec, jobs: usize) -> Result<MatrixOutcome, CliError> {
    spec.base.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let work: Vec<(Instance, u64)> = spec
        .instances
        .iter()
        .flat_map(|&i| (0..spec.seeds).map(move |r| (i, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
    let done = AtomicUsize::new(0);
    let results: Vec<(ScenarioConfig, RunMetrics)> = pool.install(|| {
        work.par_iter()
            .map(|&(inst, r)| {
                let cfg = spec.run_config(inst, r);
                let m = run_one(&cfg)?;
                if spec.progress {
                    let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                    eprintln!("[{k}/{}] {inst} seed {}", work.len(), cfg.seed);
                }
                Ok((cfg, m))
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;

    let mut results = results.into_iter();
    let runs: Vec<_> = spec
        .instances
        .iter()
        .map(|&i| (i, results.by_ref().take(spec.seeds as usize).collect::<Vec<_>>()))
        .collect();
    let summaries = runs
        .iter()
        .filter(|(_, r)| !r.is_empty())
        .map(|(i, r)| {
            let m: Vec<RunMetrics> = r.iter().map(|(_, m)| m.clone()).collect();
            summarize(&i.to_string(), &m)
        })
        .collect();
    let mut comparisons = Vec::new();
    for (k, (a, ra)) in runs.iter().enumerate() {
        for (b, rb) in &runs[k + 1..] {
            if ra.is_empty() || rb.is_empty() {
                continue;
            }
            let va = metric_values(ra.iter().map(|(_, m)| m));
            let vb = metric_values(rb.iter().map(|(_, m)| m));
            comparisons.push(compare(&a.to_string(), &va, &b.to_string(), &vb, COMPARE_METRIC));
        }
    }
    Ok(MatrixOutcome {
        runs,
        summaries,
        comparisons,
    })
}

#[derive(Serialize)]
struct MatrixManifest<'a> {
    tool_version: &'a str,
    config_hash: String,
    base_seed: u64,
    seeds: u64,
    instances: Vec<String>,
    runs: usize,
}

/// Writes per-run files, `summary.csv`, `comparisons.csv`, `config.toml`
/// and `manifest.json` under `dir`.
pub fn write_matrix(dir: &Path, spec: &MatrixSpec, outcome: &MatrixOutcome) -> Result<(), CliError> {
    write_config(dir, &spec.base)?;
    for (_, runs) in &outcome.runs {
        for (cfg, m) in runs {
            write_run(dir, cfg, m, None)?;
        }
    }
    for (name, rows) in [("summary.csv", csv_bytes(&outcome.summaries)), ("comparisons.csv", csv_bytes(&outcome.comparisons))] {
        let path = dir.join(name);
        fs::write(&path, rows.map_err(CliError::csv(&path))?).map_err(CliError::io(&path))?;
    }
    let manifest = MatrixManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        config_hash: config_hash(&spec.base),
        base_seed: spec.base_seed,
        seeds: spec.seeds,
        instances: spec.instances.iter().map(ToString::to_string).collect(),
        runs: outcome.runs.iter().map(|(_, r)| r.len()).sum(),
    };
    write_json(&dir.join("manifest.json"), &manifest)
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, csv::Error> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(buf)
}
