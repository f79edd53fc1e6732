use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub time: f64,
    pub position: f64,
    pub speed: f64,
}

/// One vehicle's trajectory; the first and last samples are entry and exit.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub vehicle_id: u32,
    pub samples: Vec<Sample>,
}

impl Track {
    pub fn entry(&self) -> f64 {
        self.samples[0].time
    }

    pub fn exit(&self) -> f64 {
        self.samples[self.samples.len() - 1].time
    }

    /// Mean of the non-zero speed samples: the speed while moving.
    pub fn moving_speed(&self) -> Option<f64> {
        let moving: Vec<f64> = self.samples.iter().map(|s| s.speed).filter(|v| *v > 0.0).collect();
        (!moving.is_empty()).then(|| moving.iter().sum::<f64>() / moving.len() as f64)
    }

    /// Position at `t` by linear interpolation; `None` outside [entry, exit].
    pub fn position_at(&self, t: f64) -> Option<f64> {
        if t < self.entry() || t > self.exit() {
            return None;
        }
        let i = self.samples.partition_point(|s| s.time <= t);
        // i >= 1 because samples[0].time <= t
        let a = &self.samples[i - 1];
        if a.time == t || i == self.samples.len() {
            return Some(a.position);
        }
        let b = &self.samples[i];
        let f = (t - a.time) / (b.time - a.time);
        Some(a.position + f * (b.position - a.position))
    }
}

/// Vehicle trajectories along a one-way avenue.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub avenue_length: f64,
    pub tracks: Vec<Track>,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("vehicle {vehicle}: {reason}")]
    Invalid { vehicle: u32, reason: String },
    #[error("trace io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    time_s: f64,
    vehicle_id: u32,
    position_m: f64,
    speed_mps: f64,
}

impl Trace {
    pub fn empty(avenue_length: f64) -> Self {
        Trace {
            avenue_length,
            tracks: Vec::new(),
        }
    }

    pub fn track(&self, vehicle_id: u32) -> Option<&Track> {
        self.tracks.iter().find(|t| t.vehicle_id == vehicle_id)
    }

    pub fn position_at(&self, vehicle_id: u32, t: f64) -> Option<f64> {
        self.track(vehicle_id)?.position_at(t)
    }

    pub fn last_exit(&self) -> Option<f64> {
        self.tracks.iter().map(Track::exit).max_by(f64::total_cmp)
    }

    /// Mean over vehicles of each vehicle's moving speed, m/s.
    pub fn empirical_mean_speed(&self) -> Option<f64> {
        let v: Vec<f64> = self.tracks.iter().filter_map(Track::moving_speed).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    /// Checks bounds, strictly increasing time, non-decreasing position and,
    /// when given, the speed limit in m/s.
    pub fn validate(&self, max_speed: Option<f64>) -> Result<(), TraceError> {
        let invalid = |vehicle, reason: String| Err(TraceError::Invalid { vehicle, reason });
        let mut ids: Vec<u32> = self.tracks.iter().map(|t| t.vehicle_id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return invalid(w[0], "appears twice".into());
        }
        for track in &self.tracks {
            let id = track.vehicle_id;
            if track.samples.is_empty() {
                return invalid(id, "has no samples".into());
            }
            for (k, s) in track.samples.iter().enumerate() {
                if !(s.time.is_finite() && s.position.is_finite() && s.speed.is_finite()) {
                    return invalid(id, format!("non-finite value at t={}", s.time));
                }
                if s.position < 0.0 || s.position > self.avenue_length {
                    return invalid(
                        id,
                        format!("position {} outside [0, {}] at t={}", s.position, self.avenue_length, s.time),
                    );
                }
                if s.speed < 0.0 || max_speed.is_some_and(|m| s.speed > m + 1e-9) {
                    return invalid(id, format!("speed {} out of range at t={}", s.speed, s.time));
                }
                if k > 0 {
                    let prev = &track.samples[k - 1];
                    if s.time <= prev.time {
                        return invalid(id, format!("time not increasing at t={}", s.time));
                    }
                    if s.position < prev.position {
                        return invalid(id, format!("moves backwards at t={}", s.time));
                    }
                }
            }
        }
        Ok(())
    }

    /// Writes `time_s,vehicle_id,position_m,speed_mps` rows grouped by vehicle.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), TraceError> {
        let mut w = csv::Writer::from_writer(out);
        for track in &self.tracks {
            for s in &track.samples {
                w.serialize(Row {
                    time_s: s.time,
                    vehicle_id: track.vehicle_id,
                    position_m: s.position,
                    speed_mps: s.speed,
                })
                .map_err(csv_io)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), TraceError> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Parses the CSV format written by [`Trace::write_csv`]. Rows of one
    /// vehicle must be in time order; vehicles may interleave.
    pub fn read_csv<R: Read>(input: R, avenue_length: f64, max_speed: Option<f64>) -> Result<Trace, TraceError> {
        let mut r = csv::Reader::from_reader(input);
        let mut tracks: Vec<Track> = Vec::new();
        for result in r.deserialize::<Row>() {
            let row = result.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                TraceError::Malformed {
                    line,
                    reason: e.to_string(),
                }
            })?;
            let sample = Sample {
                time: row.time_s,
                position: row.position_m,
                speed: row.speed_mps,
            };
            match tracks.iter_mut().find(|t| t.vehicle_id == row.vehicle_id) {
                Some(t) => t.samples.push(sample),
                None => tracks.push(Track {
                    vehicle_id: row.vehicle_id,
                    samples: vec![sample],
                }),
            }
        }
        let trace = Trace { avenue_length, tracks };
        trace.validate(max_speed)?;
        Ok(trace)
    }

    pub fn load(path: &Path, avenue_length: f64, max_speed: Option<f64>) -> Result<Trace, TraceError> {
        Trace::read_csv(std::fs::File::open(path)?, avenue_length, max_speed)
    }
}

fn csv_io(e: csv::Error) -> TraceError {
    TraceError::Io(std::io::Error::other(e.to_string()))
}
