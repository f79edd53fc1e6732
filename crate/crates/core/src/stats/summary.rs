use std::io::Write;

use serde::{Deserialize, Serialize};

use super::metrics::{AppKind, RunMetrics};
use super::nonparam::{mann_whitney_u, vargha_delaney_a12};

/// One row of the summary CSV: an instance aggregated over its runs.
/// Ratios are fractions in [0, 1]; per-kind ratios are means of per-run
/// ratios over the runs where that kind sent anything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub instance: String,
    pub runs: usize,
    pub satisfaction_mean: f64,
    pub satisfaction_min: f64,
    pub satisfaction_max: f64,
    pub interests_total: u64,
    pub data_total: u64,
    pub data_mean: f64,
    pub distinct_interests: u64,
    pub distinct_data: u64,
    pub distinct_satisfaction_mean: f64,
    pub shared_interests: u64,
    pub shared_data: u64,
    pub shared_satisfaction_mean: f64,
    pub packets_processed_mean: f64,
}

/// Aggregates the runs of one instance.
///
/// # Panics
/// If `runs` is empty.
pub fn summarize(instance: &str, runs: &[RunMetrics]) -> InstanceSummary {
    assert!(!runs.is_empty(), "summarize needs at least one run");
    let n = runs.len() as f64;
    let ratios: Vec<f64> = runs.iter().map(|r| r.totals().satisfaction_ratio()).collect();
    let kind_mean = |kind: AppKind| {
        let v: Vec<f64> = runs
            .iter()
            .map(|r| r.totals_for(kind))
            .filter(|t| t.interests_sent > 0)
            .map(|t| t.satisfaction_ratio())
            .collect();
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let sum = |kind: Option<AppKind>| {
        runs.iter().fold((0u64, 0u64), |(i, d), r| {
            let t = match kind {
                Some(k) => r.totals_for(k),
                None => r.totals(),
            };
            (i + t.interests_sent, d + t.data_received)
        })
    };
    let (interests_total, data_total) = sum(None);
    let (distinct_interests, distinct_data) = sum(Some(AppKind::Distinct));
    let (shared_interests, shared_data) = sum(Some(AppKind::Shared));
    InstanceSummary {
        instance: instance.to_string(),
        runs: runs.len(),
        satisfaction_mean: ratios.iter().sum::<f64>() / n,
        satisfaction_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        satisfaction_max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        interests_total,
        data_total,
        data_mean: data_total as f64 / n,
        distinct_interests,
        distinct_data,
        distinct_satisfaction_mean: kind_mean(AppKind::Distinct),
        shared_interests,
        shared_data,
        shared_satisfaction_mean: kind_mean(AppKind::Shared),
        packets_processed_mean: runs.iter().map(|r| r.packets_processed() as f64).sum::<f64>() / n,
    }
}

/// One row of the comparison CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub instance_a: String,
    pub instance_b: String,
    pub metric: String,
    pub n1: usize,
    pub n2: usize,
    pub u_statistic: f64,
    pub p_value: f64,
    pub a12: f64,
}

/// Mann-Whitney U and Vargha-Delaney A of `a` against `b`.
pub fn compare(instance_a: &str, a: &[f64], instance_b: &str, b: &[f64], metric: &str) -> ComparisonResult {
    let mw = mann_whitney_u(a, b);
    ComparisonResult {
        instance_a: instance_a.to_string(),
        instance_b: instance_b.to_string(),
        metric: metric.to_string(),
        n1: a.len(),
        n2: b.len(),
        u_statistic: mw.u,
        p_value: mw.p_value,
        a12: vargha_delaney_a12(a, b),
    }
}

pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
