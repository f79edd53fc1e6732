use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Triangular};
use serde::{Deserialize, Serialize};

use super::trace::{Sample, Trace, Track};

/// Synthetic one-way traffic along the avenue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrafficParams {
    /// CSV trace (`time_s,vehicle_id,position_m,speed_mps`) to use instead
    /// of generating trajectories. Relative paths resolve against the
    /// config file's directory.
    pub trace_file: Option<std::path::PathBuf>,
    pub avenue_length_m: f64,
    pub vehicle_count: u32,
    /// Window over which vehicles enter.
    pub duration_s: f64,
    pub mean_speed_kmh: f64,
    pub max_speed_kmh: f64,
    /// Lower end of the cruise speed support, as a fraction of the mean.
    pub min_speed_factor: f64,
    /// Stop positions; `None` places three stops at quarters of the avenue.
    pub bus_stops_m: Option<Vec<f64>>,
    pub stop_dwell_s: f64,
    pub bus_fraction: f64,
    pub sample_interval_s: f64,
}

impl Default for TrafficParams {
    fn default() -> Self {
        TrafficParams {
            trace_file: None,
            avenue_length_m: 172.0,
            vehicle_count: 125,
            duration_s: 300.0,
            mean_speed_kmh: 31.0,
            max_speed_kmh: 60.0,
            min_speed_factor: 0.5,
            bus_stops_m: None,
            stop_dwell_s: 15.0,
            bus_fraction: 0.1,
            sample_interval_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("traffic.{field}: {reason}")]
pub struct TrafficError {
    pub field: &'static str,
    pub reason: String,
}

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

impl TrafficParams {
    pub fn stops(&self) -> Vec<f64> {
        match &self.bus_stops_m {
            Some(s) => s.clone(),
            None => (1..=3).map(|k| self.avenue_length_m * k as f64 / 4.0).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), TrafficError> {
        let err = |field, reason: &str| {
            Err(TrafficError {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.avenue_length_m > 0.0) {
            return err("avenue_length_m", "must be positive");
        }
        if !(self.duration_s > 0.0) {
            return err("duration_s", "must be positive");
        }
        if !(self.mean_speed_kmh > 0.0) {
            return err("mean_speed_kmh", "must be positive");
        }
        if self.mean_speed_kmh > self.max_speed_kmh {
            return err("mean_speed_kmh", "exceeds max_speed_kmh");
        }
        if !(self.min_speed_factor > 0.0 && self.min_speed_factor <= 1.0) {
            return err("min_speed_factor", "must be in (0, 1]");
        }
        if self.stops().iter().any(|s| !(0.0..=self.avenue_length_m).contains(s)) {
            return err("bus_stops_m", "stops must lie on the avenue");
        }
        if !(self.stop_dwell_s >= 0.0) {
            return err("stop_dwell_s", "must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.bus_fraction) {
            return err("bus_fraction", "must be in [0, 1]");
        }
        if !(self.sample_interval_s > 0.0) {
            return err("sample_interval_s", "must be positive");
        }
        Ok(())
    }

    /// Triangular cruise speed distribution in m/s. The mode is placed so the
    /// distribution mean equals `mean_speed_kmh` whenever that is feasible.
    pub fn speed_distribution(&self) -> (f64, f64, f64) {
        let lo = kmh_to_mps(self.mean_speed_kmh * self.min_speed_factor);
        let hi = kmh_to_mps(self.max_speed_kmh);
        let mode = (3.0 * kmh_to_mps(self.mean_speed_kmh) - lo - hi).clamp(lo, hi);
        (lo, hi, mode)
    }
}

/// Generates a trace: vehicles enter at stratified uniform times, cruise at
/// a sampled constant speed, and buses dwell at every stop.
pub fn generate_trace(params: &TrafficParams, seed: u64) -> Result<Trace, TrafficError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.vehicle_count as usize;
    let (lo, hi, mode) = params.speed_distribution();
    let speeds: Vec<f64> = if hi > lo {
        let tri = Triangular::new(lo, hi, mode).expect("validated support");
        (0..n).map(|_| tri.sample(&mut rng)).collect()
    } else {
        vec![hi; n]
    };
    let bus_count = (n as f64 * params.bus_fraction).round() as usize;
    let mut is_bus = vec![false; n];
    for i in sample(&mut rng, n, bus_count.min(n)).into_iter() {
        is_bus[i] = true;
    }
    let slot = params.duration_s / n.max(1) as f64;
    let mut stops = params.stops();
    stops.sort_by(f64::total_cmp);

    let mut tracks = Vec::with_capacity(n);
    for i in 0..n {
        let entry = (i as f64 + rng.gen::<f64>()) * slot;
        let dwell: &[f64] = if is_bus[i] { &stops } else { &[] };
        tracks.push(Track {
            vehicle_id: i as u32,
            samples: drive(entry, speeds[i], params, dwell),
        });
    }
    Ok(Trace {
        avenue_length: params.avenue_length_m,
        tracks,
    })
}

// Piecewise trajectory: segments of constant speed between stops, sampled
// on a fixed grid plus every segment boundary.
fn drive(entry: f64, v: f64, params: &TrafficParams, stops: &[f64]) -> Vec<Sample> {
    // (start time, start position, speed, end time)
    let mut segments = Vec::new();
    let (mut t, mut x) = (entry, 0.0);
    for &s in stops {
        let arrive = t + (s - x) / v;
        segments.push((t, x, v, arrive));
        if params.stop_dwell_s > 0.0 {
            segments.push((arrive, s, 0.0, arrive + params.stop_dwell_s));
        }
        t = arrive + params.stop_dwell_s;
        x = s;
    }
    let exit = t + (params.avenue_length_m - x) / v;
    segments.push((t, x, v, exit));

    let mut times: Vec<f64> = segments.iter().map(|s| s.0).collect();
    times.push(exit);
    let mut k = 1.0;
    while entry + k * params.sample_interval_s < exit {
        times.push(entry + k * params.sample_interval_s);
        k += 1.0;
    }
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    times
        .into_iter()
        .map(|time| {
            let seg = segments
                .iter()
                .rev()
                .find(|s| s.0 <= time)
                .copied()
                .unwrap_or(segments[0]);
            let (t0, x0, speed, t1) = seg;
            if time >= exit {
                return Sample {
                    time,
                    position: params.avenue_length_m,
                    speed: v,
                };
            }
            let position = (x0 + speed * (time.min(t1) - t0)).clamp(0.0, params.avenue_length_m);
            Sample { time, position, speed }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_vehicles_no_tracks() {
        let p = TrafficParams {
            vehicle_count: 0,
            ..TrafficParams::default()
        };
        assert!(generate_trace(&p, 1).unwrap().tracks.is_empty());
    }

    #[test]
    fn mean_above_max_rejected() {
        let p = TrafficParams {
            mean_speed_kmh: 70.0,
            ..TrafficParams::default()
        };
        assert!(generate_trace(&p, 1).is_err());
    }

    #[test]
    fn constant_speed_crossing_time() {
        let p = TrafficParams {
            vehicle_count: 1,
            mean_speed_kmh: 60.0,
            max_speed_kmh: 60.0,
            min_speed_factor: 1.0,
            bus_fraction: 0.0,
            ..TrafficParams::default()
        };
        let tr = generate_trace(&p, 3).unwrap();
        let t = &tr.tracks[0];
        let crossing = t.exit() - t.entry();
        assert!((crossing - 172.0 / (60.0 / 3.6)).abs() < 1e-9, "{crossing}");
        assert!((crossing - 10.32).abs() < 0.01);
        assert_eq!(t.samples.last().unwrap().position, 172.0);
    }

    #[test]
    fn buses_dwell_at_every_stop() {
        let p = TrafficParams {
            vehicle_count: 1,
            bus_fraction: 1.0,
            ..TrafficParams::default()
        };
        let tr = generate_trace(&p, 5).unwrap();
        let t = &tr.tracks[0];
        let v = t.moving_speed().unwrap();
        let expected = 172.0 / v + 3.0 * 15.0;
        assert!((t.exit() - t.entry() - expected).abs() < 1e-6);
        for stop in p.stops() {
            let arrive = t.samples.iter().find(|s| (s.position - stop).abs() < 1e-9).unwrap().time;
            assert_eq!(t.position_at(arrive + 7.5), Some(stop));
        }
    }

    #[test]
    fn mode_gives_requested_mean() {
        let (lo, hi, mode) = TrafficParams::default().speed_distribution();
        assert!(((lo + hi + mode) / 3.0 - 31.0 / 3.6).abs() < 1e-12);
    }
}
